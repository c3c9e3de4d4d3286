// tests/support/gradcases.cpp

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

#include "gradcases.hpp"

#include <cmath>

#include "oracles.hpp"
#include "slmforge/asr/ctc.hpp"
#include "slmforge/common/rng.hpp"
#include "slmforge/nn/layers.hpp"
#include "slmforge/nn/ops.hpp"

namespace slmforge::testing {
namespace {

using nn::Tensor;
using Inputs = std::vector<Tensor>;

std::size_t Dim(Rng& rng, std::size_t lo = 1, std::size_t hi = 4) {
  return lo + static_cast<std::size_t>(rng.Below(hi - lo + 1));
}

GradCase Unary(const std::string& name, Tensor (*op)(const Tensor&)) {
  return {name, [op](std::uint64_t seed) {
            Rng rng(seed);
            const Tensor x = RandomLeaf({Dim(rng), Dim(rng, 2, 5)}, seed);
            return MaxGradError([op](const Inputs& in) { return op(in[0]); }, {x});
          }};
}

GradCase Binary(const std::string& name, Tensor (*op)(const Tensor&, const Tensor&)) {
  return {name, [op](std::uint64_t seed) {
            Rng rng(seed);
            const std::size_t r = Dim(rng), c = Dim(rng);
            const bool broadcast = rng.Below(2) == 1;
            const Tensor a = RandomLeaf({r, c}, seed);
            const Tensor b = broadcast ? RandomLeaf({c}, seed + 1) : RandomLeaf({r, c}, seed + 1);
            return MaxGradError([op](const Inputs& in) { return op(in[0], in[1]); }, {a, b});
          }};
}

}  // namespace

std::vector<GradCase> GradCases() {
  std::vector<GradCase> cases;
  cases.push_back(Binary("add", nn::Add));
  cases.push_back(Binary("sub", nn::Sub));
  cases.push_back(Binary("mul", nn::Mul));
  cases.push_back(Unary("softmax", nn::Softmax));
  cases.push_back(Unary("log_softmax", nn::LogSoftmax));
  cases.push_back({"relu", [](std::uint64_t seed) {
                     Rng rng(seed);
                     Tensor x = RandomLeaf({Dim(rng), Dim(rng, 2, 5)}, seed);
                     // Keep clear of the kink at 0.
                     for (auto& v : x.mutable_values()) {
                       if (std::fabs(v) < 0.05) v = v < 0 ? v - 0.05 : v + 0.05;
                     }
                     return MaxGradError([](const Inputs& in) { return nn::Relu(in[0]); }, {x});
                   }});
  cases.push_back(Unary("gelu", nn::Gelu));
  cases.push_back(Unary("transpose", nn::Transpose));
  cases.push_back(Unary("sum", nn::Sum));
  cases.push_back(Unary("mean", nn::Mean));
  cases.push_back({"scale", [](std::uint64_t seed) {
                     const Tensor x = RandomLeaf({3, 2}, seed);
                     return MaxGradError([](const Inputs& in) { return nn::Scale(in[0], -1.7); }, {x});
                   }});
  cases.push_back({"matmul", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t m = Dim(rng), k = Dim(rng), n = Dim(rng);
                     return MaxGradError([](const Inputs& in) { return nn::MatMul(in[0], in[1]); },
                                         {RandomLeaf({m, k}, seed), RandomLeaf({k, n}, seed + 1)});
                   }});
  cases.push_back({"reshape", [](std::uint64_t seed) {
                     return MaxGradError(
                         [](const Inputs& in) { return nn::Mul(nn::Reshape(in[0], {2, 6}), in[1]); },
                         {RandomLeaf({3, 4}, seed), RandomLeaf({2, 6}, seed + 1)});
                   }});
  cases.push_back({"concat_last_dim", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t r = Dim(rng);
                     return MaxGradError([](const Inputs& in) { return nn::ConcatLastDim(in); },
                                         {RandomLeaf({r, Dim(rng)}, seed), RandomLeaf({r, Dim(rng)}, seed + 1),
                                          RandomLeaf({r, Dim(rng)}, seed + 2)});
                   }});
  cases.push_back({"slice_last_dim", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t c = Dim(rng, 2, 6);
                     const std::size_t start = rng.Below(c - 1);
                     const std::size_t len = 1 + rng.Below(c - start);
                     return MaxGradError(
                         [=](const Inputs& in) { return nn::SliceLastDim(in[0], start, len); },
                         {RandomLeaf({Dim(rng), c}, seed)});
                   }});
  cases.push_back({"concat_rows", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t c = Dim(rng);
                     return MaxGradError([](const Inputs& in) { return nn::ConcatRows(in); },
                                         {RandomLeaf({Dim(rng), c}, seed), RandomLeaf({Dim(rng), c}, seed + 1)});
                   }});
  cases.push_back({"slice_rows", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t r = Dim(rng, 2, 6);
                     const std::size_t start = rng.Below(r - 1);
                     const std::size_t len = 1 + rng.Below(r - start);
                     return MaxGradError([=](const Inputs& in) { return nn::SliceRows(in[0], start, len); },
                                         {RandomLeaf({r, Dim(rng)}, seed)});
                   }});
  cases.push_back({"layer_norm", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t c = Dim(rng, 2, 6);
                     return MaxGradError(
                         [](const Inputs& in) { return nn::LayerNorm(in[0], in[1], in[2]); },
                         {RandomLeaf({Dim(rng), c}, seed), RandomLeaf({c}, seed + 1),
                          RandomLeaf({c}, seed + 2)});
                   }});
  cases.push_back({"embedding_lookup", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t v = Dim(rng, 2, 5);
                     std::vector<int> ids(Dim(rng, 1, 6));
                     for (auto& id : ids) id = static_cast<int>(rng.Below(v));
                     return MaxGradError([ids](const Inputs& in) { return nn::EmbeddingLookup(in[0], ids); },
                                         {RandomLeaf({v, Dim(rng)}, seed)});
                   }});
  cases.push_back({"conv1d", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t cin = Dim(rng), cout = Dim(rng), kernel = Dim(rng, 1, 3);
                     const std::size_t stride = Dim(rng, 1, 2), pad = rng.Below(2);
                     const std::size_t t = kernel + Dim(rng, 0, 4);
                     return MaxGradError(
                         [=](const Inputs& in) { return nn::Conv1d(in[0], in[1], in[2], kernel, stride, pad); },
                         {RandomLeaf({t, cin}, seed), RandomLeaf({kernel * cin, cout}, seed + 1),
                          RandomLeaf({cout}, seed + 2)});
                   }});
  cases.push_back({"cross_entropy", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t t = Dim(rng, 1, 5), v = Dim(rng, 2, 5);
                     std::vector<int> targets(t);
                     std::vector<std::uint8_t> mask(t);
                     for (std::size_t i = 0; i < t; ++i) {
                       targets[i] = static_cast<int>(rng.Below(v));
                       mask[i] = rng.Below(3) != 0;
                     }
                     mask[rng.Below(t)] = 1;
                     return MaxGradError(
                         [=](const Inputs& in) { return nn::CrossEntropy(in[0], targets, mask); },
                         {RandomLeaf({t, v}, seed)});
                   }});
  cases.push_back({"replace_rows", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t t = Dim(rng, 1, 5), c = Dim(rng);
                     std::vector<std::uint8_t> mask(t);
                     for (auto& m : mask) m = rng.Below(2);
                     return MaxGradError(
                         [=](const Inputs& in) { return nn::ReplaceRows(in[0], mask, in[1]); },
                         {RandomLeaf({t, c}, seed), RandomLeaf({c}, seed + 1)});
                   }});
  cases.push_back({"ctc_loss", [](std::uint64_t seed) {
                     Rng rng(seed);
                     const std::size_t v = Dim(rng, 2, 4);
                     std::vector<int> target(Dim(rng, 0, 3));
                     for (auto& s : target) s = 1 + static_cast<int>(rng.Below(v - 1));
                     const std::size_t t = std::max<std::size_t>(1, asr::CtcMinFrames(target)) + Dim(rng, 0, 2);
                     return MaxGradError(
                         [=](const Inputs& in) { return asr::CtcLoss(nn::LogSoftmax(in[0]), target); },
                         {RandomLeaf({t, v}, seed)});
                   }});

  // Layers: gradients with respect to the input and every parameter.
  auto layer_case = [](const std::string& name, auto make, nn::Shape input_shape, auto forward) {
    return GradCase{name, [=](std::uint64_t seed) {
                      Rng rng(seed);
                      auto layer = make(rng);
                      Rng fill(seed + 7);
                      for (auto& p : layer->Parameters()) {
                        for (auto& v : p.tensor.mutable_values()) v = fill.Uniform(-1.0, 1.0);
                      }
                      Inputs inputs{RandomLeaf(input_shape, seed)};
                      for (auto& p : layer->Parameters()) inputs.push_back(p.tensor);
                      return MaxGradError([&](const Inputs& in) { return forward(*layer, in[0]); }, inputs);
                    }};
  };
  cases.push_back(layer_case(
      "linear", [](Rng& rng) { return std::make_unique<nn::Linear>(3, 2, rng); }, {4, 3},
      [](const nn::Linear& l, const Tensor& x) { return l.Forward(x); }));
  cases.push_back(layer_case(
      "conv1d_layer", [](Rng& rng) { return std::make_unique<nn::Conv1dLayer>(2, 3, 4, 2, rng); },
      {7, 2}, [](const nn::Conv1dLayer& l, const Tensor& x) { return l.Forward(x); }));
  cases.push_back(layer_case(
      "attention_causal", [](Rng& rng) { return std::make_unique<nn::MultiHeadAttention>(4, 2, rng); },
      {3, 4}, [](const nn::MultiHeadAttention& l, const Tensor& x) { return l.Forward(x, true); }));
  cases.push_back(layer_case(
      "attention_full", [](Rng& rng) { return std::make_unique<nn::MultiHeadAttention>(4, 2, rng); },
      {3, 4}, [](const nn::MultiHeadAttention& l, const Tensor& x) { return l.Forward(x, false); }));
  cases.push_back(layer_case(
      "transformer_block",
      [](Rng& rng) { return std::make_unique<nn::TransformerBlock>(4, 2, 6, rng); }, {3, 4},
      [](const nn::TransformerBlock& l, const Tensor& x) { return l.Forward(x, true); }));
  cases.push_back(layer_case(
      "layer_norm_layer", [](Rng&) { return std::make_unique<nn::LayerNormLayer>(5); }, {3, 5},
      [](const nn::LayerNormLayer& l, const Tensor& x) { return l.Forward(x); }));
  return cases;
}

}  // namespace slmforge::testing
