// include/slmforge/slm/causal_lm.hpp

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
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "slmforge/nn/layers.hpp"
#include "slmforge/slm/tokenizer.hpp"

namespace slmforge::slm {

struct LmConfig {
  std::size_t vocab = ByteTokenizer::kVocabSize;
  std::size_t width = 64;
  std::size_t layers = 2;
  std::size_t heads = 2;
  std::size_t ffn_width = 256;
  void Validate() const;
};

void to_json(nlohmann::json& j, const LmConfig& c);
void from_json(const nlohmann::json& j, LmConfig& c);

// Decoder-only transformer with sinusoidal positions and an untied output
// projection.
class CausalLm : public nn::Module {
 public:
  CausalLm(const LmConfig& cfg, Rng& rng);
  const LmConfig& config() const { return cfg_; }

  nn::Tensor Embed(std::span<const int> ids) const;
  // x: T x width input embeddings -> T x vocab logits.
  nn::Tensor ForwardEmbeddings(const nn::Tensor& x) const;
  nn::Tensor Forward(std::span<const int> ids) const;

 private:
  LmConfig cfg_;
  nn::Embedding embedding_;
  std::vector<std::unique_ptr<nn::TransformerBlock>> blocks_;
  nn::LayerNormLayer final_ln_;
  nn::Linear out_;
};

// Mean next-token cross-entropy over positions t whose target ids[t + 1]
// has mask[t + 1] set. An empty mask selects every target.
nn::Tensor NextTokenLoss(const CausalLm& lm, std::span<const int> ids,
                         std::span<const std::uint8_t> mask = {});

struct LmTrainConfig {
  std::size_t steps = 1000;
  std::size_t batch_size = 4;
  double lr = 3e-3;
  std::uint64_t seed = 0;
};

// Text-only training of the LM itself; returns the per-step losses.
std::vector<double> TrainLm(CausalLm& lm, const std::vector<std::vector<int>>& sequences,
                            const LmTrainConfig& cfg);

// Greedy continuation of `prompt` until kEnd or max_tokens new tokens.
std::vector<int> GreedyContinue(const CausalLm& lm, std::vector<int> prompt, std::size_t max_tokens);

}  // namespace slmforge::slm
