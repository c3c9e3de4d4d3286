// src/slm/causal_lm.cpp

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

#include "slmforge/slm/causal_lm.hpp"

#include <algorithm>
#include <numeric>

#include "slmforge/common/error.hpp"
#include "slmforge/common/log.hpp"
#include "slmforge/nn/adam.hpp"

namespace slmforge::slm {

void LmConfig::Validate() const {
  if (vocab == 0 || width == 0 || ffn_width == 0) throw ConfigError("LM dims must be positive");
  if (heads == 0 || width % heads != 0) throw ConfigError("LM width must divide by heads");
}

void to_json(nlohmann::json& j, const LmConfig& c) {
  j = nlohmann::json{{"vocab", c.vocab},   {"width", c.width},        {"layers", c.layers},
                     {"heads", c.heads},   {"ffn_width", c.ffn_width}};
}

void from_json(const nlohmann::json& j, LmConfig& c) {
  LmConfig d;
  c.vocab = j.value("vocab", d.vocab);
  c.width = j.value("width", d.width);
  c.layers = j.value("layers", d.layers);
  c.heads = j.value("heads", d.heads);
  c.ffn_width = j.value("ffn_width", d.ffn_width);
}

CausalLm::CausalLm(const LmConfig& cfg, Rng& rng)
    : cfg_((cfg.Validate(), cfg)),
      embedding_(cfg.vocab, cfg.width, rng),
      final_ln_(cfg.width),
      out_(cfg.width, cfg.vocab, rng) {
  RegisterModule("embedding", &embedding_);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    blocks_.push_back(std::make_unique<nn::TransformerBlock>(cfg.width, cfg.heads, cfg.ffn_width, rng));
    RegisterModule("block" + std::to_string(l), blocks_.back().get());
  }
  RegisterModule("final_ln", &final_ln_);
  RegisterModule("out", &out_);
}

nn::Tensor CausalLm::Embed(std::span<const int> ids) const {
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= cfg_.vocab) {
      throw nn::ShapeError("token id " + std::to_string(id) + " outside LM vocab");
    }
  }
  return embedding_.Forward(ids);
}

nn::Tensor CausalLm::ForwardEmbeddings(const nn::Tensor& x) const {
  if (x.rank() != 2 || x.dim(1) != cfg_.width) {
    throw nn::ShapeError("LM expects T x " + std::to_string(cfg_.width) + " embeddings, got " +
                         nn::ShapeString(x.shape()));
  }
  nn::Tensor h = nn::Add(x, nn::SinusoidalPositions(x.dim(0), cfg_.width));
  for (const auto& block : blocks_) h = block->Forward(h, /*causal=*/true);
  return out_.Forward(final_ln_.Forward(h));
}

nn::Tensor CausalLm::Forward(std::span<const int> ids) const { return ForwardEmbeddings(Embed(ids)); }

nn::Tensor NextTokenLoss(const CausalLm& lm, std::span<const int> ids,
                         std::span<const std::uint8_t> mask) {
  if (ids.size() < 2) throw nn::ShapeError("next-token loss needs at least two tokens");
  if (!mask.empty() && mask.size() != ids.size()) throw nn::ShapeError("loss mask length mismatch");
  const std::size_t n = ids.size() - 1;
  nn::Tensor logits = lm.Forward(ids.first(n));
  std::vector<int> targets(ids.begin() + 1, ids.end());
  std::vector<std::uint8_t> m(n, 1);
  if (!mask.empty()) std::copy(mask.begin() + 1, mask.end(), m.begin());
  return nn::CrossEntropy(logits, targets, m);
}

std::vector<double> TrainLm(CausalLm& lm, const std::vector<std::vector<int>>& sequences,
                            const LmTrainConfig& cfg) {
  if (sequences.empty()) throw ConfigError("LM training needs at least one sequence");
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be positive");
  nn::Adam adam(lm.TrainableParameters(), nn::AdamConfig{.lr = cfg.lr});
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(sequences.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  std::vector<double> losses;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    adam.ZeroGrad();
    nn::Tensor loss;
    for (std::size_t b = 0; b < cfg.batch_size; ++b) {
      if (cursor == order.size()) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
        cursor = 0;
      }
      nn::Tensor l = NextTokenLoss(lm, sequences[order[cursor++]]);
      loss = b == 0 ? l : nn::Add(loss, l);
    }
    loss = nn::Scale(loss, 1.0 / static_cast<double>(cfg.batch_size));
    loss.Backward();
    adam.Step();
    losses.push_back(loss.item());
    if ((step + 1) % 100 == 0) LogDebug("lm step ", step + 1, " loss ", loss.item());
  }
  return losses;
}

std::vector<int> GreedyContinue(const CausalLm& lm, std::vector<int> prompt, std::size_t max_tokens) {
  std::vector<int> out;
  for (std::size_t i = 0; i < max_tokens; ++i) {
    nn::Tensor logits = lm.Forward(prompt);
    const auto v = logits.values();
    const std::size_t V = logits.dim(1);
    const double* row = v.data() + (logits.dim(0) - 1) * V;
    const int next = static_cast<int>(std::max_element(row, row + V) - row);
    if (next == ByteTokenizer::kEnd) break;
    out.push_back(next);
    prompt.push_back(next);
  }
  return out;
}

}  // namespace slmforge::slm
