// src/nn/module.cpp

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

#include "slmforge/nn/module.hpp"

#include <set>

namespace slmforge::nn {

std::vector<NamedTensor> Module::Parameters() const {
  std::vector<NamedTensor> out;
  Collect("", out);
  return out;
}

std::vector<NamedTensor> Module::TrainableParameters() const {
  std::vector<NamedTensor> out;
  for (auto& p : Parameters())
    if (p.tensor.requires_grad()) out.push_back(p);
  return out;
}

void Module::Collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  for (const auto& p : params_) out.push_back({prefix + p.name, p.tensor});
  for (const auto& [name, child] : children_) child->Collect(prefix + name + ".", out);
}

void Module::SetFrozen(bool frozen) {
  for (auto& p : Parameters()) p.tensor.set_requires_grad(!frozen);
}

void Module::ZeroGrad() {
  for (auto& p : Parameters()) p.tensor.ClearGrad();
}

std::size_t Module::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& p : Parameters()) n += p.tensor.size();
  return n;
}

Tensor Module::RegisterParameter(const std::string& name, Tensor tensor) {
  for (const auto& p : params_) {
    if (p.name == name) throw AutodiffError("duplicate parameter name '" + name + "'");
  }
  params_.push_back({name, tensor});
  return tensor;
}

void Module::RegisterModule(const std::string& name, Module* child) {
  for (const auto& c : children_) {
    if (c.first == name) throw AutodiffError("duplicate submodule name '" + name + "'");
  }
  children_.emplace_back(name, child);
}

Tensor InitWeight(Shape shape, Rng& rng, double stddev) {
  std::vector<double> v(NumElements(shape));
  for (auto& x : v) x = rng.TruncatedNormal(stddev);
  return Tensor::Leaf(std::move(v), std::move(shape), true);
}

Tensor InitZeros(Shape shape) {
  const std::size_t n = NumElements(shape);
  return Tensor::Leaf(std::vector<double>(n, 0.0), std::move(shape), true);
}

Tensor InitOnes(Shape shape) {
  const std::size_t n = NumElements(shape);
  return Tensor::Leaf(std::vector<double>(n, 1.0), std::move(shape), true);
}

}  // namespace slmforge::nn
