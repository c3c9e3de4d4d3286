// include/slmforge/nn/module.hpp

// Copyright 2026  The slmforge Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "slmforge/common/rng.hpp"
#include "slmforge/nn/tensor.hpp"

namespace slmforge::nn {

// Tree of named parameters. Submodules are registered by address, so a
// Module is neither copyable nor movable; own models through unique_ptr.
class Module {
 public:
  Module() = default;
  virtual ~Module() = default;
  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;

  // Depth-first in registration order, names joined with '.'.
  std::vector<NamedTensor> Parameters() const;
  std::vector<NamedTensor> TrainableParameters() const;

  // A frozen parameter never requires grad, so it never receives a gradient
  // or an optimizer update.
  void SetFrozen(bool frozen);
  void ZeroGrad();
  std::size_t ParameterCount() const;

 protected:
  Tensor RegisterParameter(const std::string& name, Tensor tensor);
  void RegisterModule(const std::string& name, Module* child);

 private:
  void Collect(const std::string& prefix, std::vector<NamedTensor>& out) const;

  std::vector<NamedTensor> params_;
  std::vector<std::pair<std::string, Module*>> children_;
};

// Truncated normal (std 0.02) weights as a trainable leaf.
Tensor InitWeight(Shape shape, Rng& rng, double stddev = 0.02);
Tensor InitZeros(Shape shape);
Tensor InitOnes(Shape shape);

}  // namespace slmforge::nn
