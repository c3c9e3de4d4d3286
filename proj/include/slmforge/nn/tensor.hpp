// include/slmforge/nn/tensor.hpp

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

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "slmforge/common/error.hpp"

namespace slmforge::nn {

using Shape = std::vector<std::size_t>;

std::string ShapeString(const Shape& shape);
std::size_t NumElements(const Shape& shape);

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Raised when an op produces NaN or Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class AutodiffError : public Error {
 public:
  using Error::Error;
};

// Receives the op's output value and output gradient; accumulates into the
// gradient buffer of each parent that requires grad (null otherwise).
using BackwardFn = std::function<void(std::span<const double> out_value,
                                      std::span<const double> out_grad,
                                      std::span<double* const> parent_grads)>;

namespace detail {
struct Node;
}

// Handle to a node of a dynamically recorded computation graph. Copies share
// the node. Leaves are constants, inputs or parameters; every op result
// records its parents and a backward function when any parent requires grad.
class Tensor {
 public:
  Tensor() = default;

  static Tensor Zeros(Shape shape);
  static Tensor Constant(std::vector<double> values, Shape shape);
  static Tensor Scalar(double value);
  static Tensor Leaf(std::vector<double> values, Shape shape, bool requires_grad);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t i) const;
  std::size_t size() const;
  const std::string& op() const;

  std::span<const double> values() const;
  // Direct write access is meant for leaves (optimizer updates, loading).
  std::span<double> mutable_values();
  double item() const;
  double at(std::size_t i) const { return values()[i]; }
  double at(std::size_t r, std::size_t c) const { return values()[r * dim(1) + c]; }

  bool is_leaf() const;
  bool requires_grad() const;
  // Leaves only. A leaf that does not require grad is what a frozen
  // parameter is.
  void set_requires_grad(bool value);

  bool has_grad() const;
  std::span<const double> grad() const;
  void ClearGrad();

  // Reverse-mode pass from a scalar. Gradients accumulate into leaves.
  void Backward() const;

  // Constant copy of the current value, cut from the graph.
  Tensor Detach() const;

  bool SameNode(const Tensor& other) const { return node_ == other.node_; }

  // Builds an op result. Throws NonFiniteError naming `op` when any value
  // is not finite.
  static Tensor FromOp(std::string op, Shape shape, std::vector<double> values,
                       std::vector<Tensor> parents, BackwardFn backward);

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  detail::Node& node() const;

  std::shared_ptr<detail::Node> node_;
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

}  // namespace slmforge::nn
