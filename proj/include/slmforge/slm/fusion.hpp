// include/slmforge/slm/fusion.hpp

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
#include <string>
#include <vector>

#include <json.hpp>

#include "slmforge/nn/checkpoint.hpp"
#include "slmforge/slm/aligner.hpp"
#include "slmforge/slm/causal_lm.hpp"
#include "slmforge/slm/chat.hpp"
#include "slmforge/ssl/encoder.hpp"

namespace slmforge::slm {

// Encoder, aligner and LM. Only the aligner trains.
class SpeechLlm : public nn::Module {
 public:
  // aligner_hidden 0 selects 4 * lm width; empty layers selects 1..L.
  SpeechLlm(std::unique_ptr<ssl::SpeechEncoder> encoder, std::unique_ptr<CausalLm> lm,
            std::vector<std::size_t> layers, std::size_t aligner_hidden, Rng& rng);

  const ssl::SpeechEncoder& encoder() const { return *encoder_; }
  const CausalLm& lm() const { return *lm_; }
  ssl::SpeechEncoder& encoder() { return *encoder_; }
  CausalLm& lm() { return *lm_; }
  SpeechAligner& aligner() { return aligner_; }
  const SpeechAligner& aligner() const { return aligner_; }
  const std::vector<std::size_t>& layers() const { return layers_; }

  void FreezeBackbones();

  // Multi-layer encoder features for encoder-input frames.
  audio::FeatureMatrix SpeechFeatures(const audio::FeatureMatrix& input) const;

 private:
  std::unique_ptr<ssl::SpeechEncoder> encoder_;
  std::unique_ptr<CausalLm> lm_;
  std::vector<std::size_t> layers_;
  SpeechAligner aligner_;
};

// Index of the single audio placeholder; throws ConfigError otherwise.
std::size_t PlaceholderIndex(const std::vector<int>& tokens);

// Token embeddings with the placeholder row replaced by the aligned speech
// rows: (T - 1 + T') x d_lm.
nn::Tensor FuseEmbeddings(const SpeechLlm& model, const std::vector<int>& tokens,
                          const audio::FeatureMatrix& speech);

// Next-token cross-entropy on the fused sequence, counted where the target
// text token has its loss mask set.
nn::Tensor FusionLoss(const SpeechLlm& model, const std::vector<int>& tokens,
                      const std::vector<std::uint8_t>& loss_mask,
                      const audio::FeatureMatrix& speech);

struct FusionSample {
  std::string id;
  CotMode mode = CotMode::kTranscribe;
  std::vector<int> tokens;
  std::vector<std::uint8_t> loss_mask;
  audio::FeatureMatrix speech;  // multi-layer encoder features
  std::string final_answer;
};

struct FusionConfig {
  std::size_t steps = 3000;
  std::size_t batch_size = 2;
  double lr = 1e-4;
  std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const FusionConfig& c);
void from_json(const nlohmann::json& j, FusionConfig& c);

// Freezes encoder and LM, then trains the aligner; returns per-step losses.
std::vector<double> TrainAligner(SpeechLlm& model, const std::vector<FusionSample>& samples,
                                 const FusionConfig& cfg);

struct GenerateResult {
  std::string text;
  bool truncated = false;
};

// Greedy decoding from the mode's prompt until <|end|> or max_tokens.
GenerateResult Generate(const SpeechLlm& model, const audio::FeatureMatrix& speech, CotMode mode,
                        std::size_t max_tokens);

// Tensors encoder.*, lm.*, aligner.* with the configs in metadata.
nn::Checkpoint SlmCheckpoint(const SpeechLlm& model);
std::unique_ptr<SpeechLlm> LoadSpeechLlm(const nn::Checkpoint& ckpt);

// LM-only checkpoint (kind=lm).
nn::Checkpoint LmCheckpoint(const CausalLm& lm);
std::unique_ptr<CausalLm> LoadLm(const nn::Checkpoint& ckpt, const std::string& prefix = "");

}  // namespace slmforge::slm
