// include/slmforge/nn/layers.hpp

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
#include <memory>
#include <vector>

#include "slmforge/nn/module.hpp"
#include "slmforge/nn/ops.hpp"

namespace slmforge::nn {

// y = x W + b, W stored as in x out.
class Linear : public Module {
 public:
  Linear(std::size_t in, std::size_t out, Rng& rng, bool bias = true);
  Tensor Forward(const Tensor& x) const;
  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }
  Tensor weight() const { return weight_; }
  Tensor bias() const { return bias_; }

 private:
  std::size_t in_, out_;
  Tensor weight_, bias_;
};

class LayerNormLayer : public Module {
 public:
  explicit LayerNormLayer(std::size_t width, double eps = 1e-5);
  Tensor Forward(const Tensor& x) const;

 private:
  double eps_;
  Tensor gamma_, beta_;
};

class Embedding : public Module {
 public:
  Embedding(std::size_t vocab, std::size_t width, Rng& rng);
  Tensor Forward(std::span<const int> ids) const;
  Tensor table() const { return table_; }

 private:
  Tensor table_;
};

// Time-major 1-D convolution with right padding of (kernel - stride) frames,
// so T input frames give floor(T / stride) output frames when
// kernel >= stride.
class Conv1dLayer : public Module {
 public:
  Conv1dLayer(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
              std::size_t stride, Rng& rng);
  Tensor Forward(const Tensor& x) const;
  std::size_t stride() const { return stride_; }

 private:
  std::size_t kernel_, stride_;
  Tensor weight_, bias_;
};

class MultiHeadAttention : public Module {
 public:
  MultiHeadAttention(std::size_t width, std::size_t heads, Rng& rng);
  // x: T x width. With causal set, position t attends to positions <= t.
  Tensor Forward(const Tensor& x, bool causal) const;

 private:
  std::size_t width_, heads_;
  Linear qkv_, out_;
};

// Pre-LN block: x + attn(ln1(x)), then + ffn(ln2(x)) with a GELU MLP.
class TransformerBlock : public Module {
 public:
  TransformerBlock(std::size_t width, std::size_t heads, std::size_t ffn_width, Rng& rng);
  Tensor Forward(const Tensor& x, bool causal) const;

 private:
  LayerNormLayer ln1_, ln2_;
  MultiHeadAttention attn_;
  Linear ff1_, ff2_;
};

// Fixed sinusoidal position table, T x width.
Tensor SinusoidalPositions(std::size_t length, std::size_t width);

}  // namespace slmforge::nn
