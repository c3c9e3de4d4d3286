// include/slmforge/nn/adam.hpp

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

#include <cstdint>
#include <vector>

#include "slmforge/nn/tensor.hpp"

namespace slmforge::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list. A freshly constructed
// (or Reset) optimizer has m = v = 0 and t = 0.
class Adam {
 public:
  Adam(std::vector<NamedTensor> params, AdamConfig config);

  // Updates every parameter that currently requires grad. Throws
  // AutodiffError when such a parameter has no gradient.
  void Step();
  void ZeroGrad();
  void Reset();

  std::int64_t step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }
  const std::vector<NamedTensor>& params() const { return params_; }
  const std::vector<double>& first_moment(std::size_t i) const { return m_[i]; }
  const std::vector<double>& second_moment(std::size_t i) const { return v_[i]; }

 private:
  std::vector<NamedTensor> params_;
  AdamConfig config_;
  std::vector<std::vector<double>> m_, v_;
  std::int64_t step_ = 0;
};

}  // namespace slmforge::nn
