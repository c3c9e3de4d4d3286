// src/nn/tensor.cpp

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

#include "slmforge/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace slmforge::nn {

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool grad_present = false;
  bool requires_grad = false;
  bool is_leaf = true;
  std::string op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  BackwardFn backward;
};

}  // namespace detail

std::string ShapeString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

namespace {

std::shared_ptr<detail::Node> NewLeaf(std::vector<double> values, Shape shape, bool grad) {
  if (values.size() != NumElements(shape)) {
    throw ShapeError("value count " + std::to_string(values.size()) + " does not match shape " +
                     ShapeString(shape));
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = grad;
  return node;
}

}  // namespace

Tensor Tensor::Zeros(Shape shape) {
  const std::size_t n = NumElements(shape);
  return Tensor(NewLeaf(std::vector<double>(n, 0.0), std::move(shape), false));
}

Tensor Tensor::Constant(std::vector<double> values, Shape shape) {
  return Tensor(NewLeaf(std::move(values), std::move(shape), false));
}

Tensor Tensor::Scalar(double value) { return Constant({value}, {}); }

Tensor Tensor::Leaf(std::vector<double> values, Shape shape, bool requires_grad) {
  return Tensor(NewLeaf(std::move(values), std::move(shape), requires_grad));
}

detail::Node& Tensor::node() const {
  if (!node_) throw AutodiffError("use of an undefined tensor");
  return *node_;
}

const Shape& Tensor::shape() const { return node().shape; }

std::size_t Tensor::dim(std::size_t i) const {
  const auto& s = shape();
  if (i >= s.size()) {
    throw ShapeError("dimension " + std::to_string(i) + " out of range for shape " +
                     ShapeString(s));
  }
  return s[i];
}

std::size_t Tensor::size() const { return node().value.size(); }

const std::string& Tensor::op() const { return node().op; }

std::span<const double> Tensor::values() const { return node().value; }

std::span<double> Tensor::mutable_values() { return node().value; }

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item() on tensor of shape " + ShapeString(shape()));
  return node().value[0];
}

bool Tensor::is_leaf() const { return node().is_leaf; }

bool Tensor::requires_grad() const { return node().requires_grad; }

void Tensor::set_requires_grad(bool value) {
  if (!node().is_leaf) throw AutodiffError("requires_grad can only be set on leaves");
  node().requires_grad = value;
  if (!value) ClearGrad();
}

bool Tensor::has_grad() const { return node().grad_present; }

std::span<const double> Tensor::grad() const {
  if (!node().grad_present) throw AutodiffError("tensor has no gradient");
  return node().grad;
}

void Tensor::ClearGrad() {
  node().grad.clear();
  node().grad_present = false;
}

Tensor Tensor::Detach() const { return Constant(node().value, node().shape); }

Tensor Tensor::FromOp(std::string op, Shape shape, std::vector<double> values,
                      std::vector<Tensor> parents, BackwardFn backward) {
  if (values.size() != NumElements(shape)) {
    throw ShapeError(op + ": value count does not match shape " + ShapeString(shape));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NonFiniteError(op + " produced a non-finite value at flat index " +
                           std::to_string(i));
    }
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->op = std::move(op);
  node->is_leaf = false;
  bool any = false;
  for (const auto& p : parents) any = any || p.node().requires_grad;
  if (any) {
    node->requires_grad = true;
    node->parents.reserve(parents.size());
    for (const auto& p : parents) node->parents.push_back(p.node_);
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

void Tensor::Backward() const {
  detail::Node& root = node();
  if (root.value.size() != 1) {
    throw AutodiffError("backward() needs a scalar loss, got shape " + ShapeString(root.shape));
  }
  if (!root.requires_grad) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(&root, 0);
  visited.insert(&root);
  while (!stack.empty()) {
    auto& [n, idx] = stack.back();
    if (idx < n->parents.size()) {
      detail::Node* p = n->parents[idx++].get();
      if (p->requires_grad && !p->is_leaf && visited.insert(p).second) {
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  for (detail::Node* n : order) {
    if (n != &root) {
      n->grad.assign(n->value.size(), 0.0);
      n->grad_present = true;
    }
  }
  root.grad.assign(1, 1.0);
  root.grad_present = true;

  std::vector<double*> parent_grads;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* n = *it;
    parent_grads.assign(n->parents.size(), nullptr);
    for (std::size_t i = 0; i < n->parents.size(); ++i) {
      detail::Node* p = n->parents[i].get();
      if (!p->requires_grad) continue;
      if (p->is_leaf && !p->grad_present) {
        p->grad.assign(p->value.size(), 0.0);
        p->grad_present = true;
      }
      parent_grads[i] = p->grad.data();
    }
    if (n->backward) n->backward(n->value, n->grad, parent_grads);
  }
}

}  // namespace slmforge::nn
