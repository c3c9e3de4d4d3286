// src/nn/layers.cpp

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

#include "slmforge/nn/layers.hpp"

#include <cmath>
#include <limits>

namespace slmforge::nn {

Linear::Linear(std::size_t in, std::size_t out, Rng& rng, bool bias) : in_(in), out_(out) {
  weight_ = RegisterParameter("weight", InitWeight({in, out}, rng));
  if (bias) bias_ = RegisterParameter("bias", InitZeros({out}));
}

Tensor Linear::Forward(const Tensor& x) const {
  Tensor y = MatMul(x, weight_);
  return bias_.defined() ? Add(y, bias_) : y;
}

LayerNormLayer::LayerNormLayer(std::size_t width, double eps) : eps_(eps) {
  gamma_ = RegisterParameter("gamma", InitOnes({width}));
  beta_ = RegisterParameter("beta", InitZeros({width}));
}

Tensor LayerNormLayer::Forward(const Tensor& x) const { return LayerNorm(x, gamma_, beta_, eps_); }

Embedding::Embedding(std::size_t vocab, std::size_t width, Rng& rng) {
  table_ = RegisterParameter("table", InitWeight({vocab, width}, rng));
}

Tensor Embedding::Forward(std::span<const int> ids) const { return EmbeddingLookup(table_, ids); }

Conv1dLayer::Conv1dLayer(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
                         std::size_t stride, Rng& rng)
    : kernel_(kernel), stride_(stride) {
  weight_ = RegisterParameter("weight", InitWeight({kernel * in_channels, out_channels}, rng));
  bias_ = RegisterParameter("bias", InitZeros({out_channels}));
}

Tensor Conv1dLayer::Forward(const Tensor& x) const {
  const std::size_t pad = kernel_ > stride_ ? kernel_ - stride_ : 0;
  return Conv1d(x, weight_, bias_, kernel_, stride_, pad);
}

MultiHeadAttention::MultiHeadAttention(std::size_t width, std::size_t heads, Rng& rng)
    : width_(width), heads_(heads), qkv_(width, 3 * width, rng), out_(width, width, rng) {
  if (heads == 0 || width % heads != 0) {
    throw ShapeError("attention width " + std::to_string(width) + " not divisible by " +
                     std::to_string(heads) + " heads");
  }
  RegisterModule("qkv", &qkv_);
  RegisterModule("out", &out_);
}

Tensor MultiHeadAttention::Forward(const Tensor& x, bool causal) const {
  const std::size_t t = x.dim(0);
  const std::size_t dh = width_ / heads_;
  const Tensor qkv = qkv_.Forward(x);
  Tensor mask;
  if (causal) {
    std::vector<double> m(t * t, 0.0);
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = i + 1; j < t; ++j) m[i * t + j] = -1e9;
    mask = Tensor::Constant(std::move(m), {t, t});
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Tensor> heads;
  heads.reserve(heads_);
  for (std::size_t h = 0; h < heads_; ++h) {
    const Tensor q = SliceLastDim(qkv, h * dh, dh);
    const Tensor k = SliceLastDim(qkv, width_ + h * dh, dh);
    const Tensor v = SliceLastDim(qkv, 2 * width_ + h * dh, dh);
    Tensor scores = Scale(MatMul(q, Transpose(k)), scale);
    if (causal) scores = Add(scores, mask);
    heads.push_back(MatMul(Softmax(scores), v));
  }
  return out_.Forward(heads_ == 1 ? heads[0] : ConcatLastDim(heads));
}

TransformerBlock::TransformerBlock(std::size_t width, std::size_t heads, std::size_t ffn_width,
                                   Rng& rng)
    : ln1_(width), ln2_(width), attn_(width, heads, rng), ff1_(width, ffn_width, rng),
      ff2_(ffn_width, width, rng) {
  RegisterModule("ln1", &ln1_);
  RegisterModule("attn", &attn_);
  RegisterModule("ln2", &ln2_);
  RegisterModule("ff1", &ff1_);
  RegisterModule("ff2", &ff2_);
}

Tensor TransformerBlock::Forward(const Tensor& x, bool causal) const {
  Tensor h = Add(x, attn_.Forward(ln1_.Forward(x), causal));
  return Add(h, ff2_.Forward(Gelu(ff1_.Forward(ln2_.Forward(h)))));
}

Tensor SinusoidalPositions(std::size_t length, std::size_t width) {
  std::vector<double> v(length * width);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t i = 0; i < width; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / width);
      v[t * width + i] = (i % 2 == 0) ? std::sin(t * rate) : std::cos(t * rate);
    }
  }
  return Tensor::Constant(std::move(v), {length, width});
}

}  // namespace slmforge::nn
