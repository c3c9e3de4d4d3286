// include/slmforge/asr/finetune.hpp

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
#include <utility>
#include <vector>

#include <json.hpp>

#include "slmforge/asr/vocab.hpp"
#include "slmforge/nn/checkpoint.hpp"
#include "slmforge/ssl/encoder.hpp"

namespace slmforge::asr {

// Pretrained encoder with a linear CTC head on its final layer.
class AsrModel : public nn::Module {
 public:
  AsrModel(std::unique_ptr<ssl::SpeechEncoder> encoder, std::size_t vocab_size, Rng& rng);

  // T' x V log-probabilities.
  nn::Tensor LogProbs(const nn::Tensor& features) const;
  nn::Tensor LogProbs(const audio::FeatureMatrix& features) const;

  ssl::SpeechEncoder& encoder() { return *encoder_; }
  const ssl::SpeechEncoder& encoder() const { return *encoder_; }
  nn::Linear& head() { return head_; }
  std::size_t vocab_size() const { return head_.out_features(); }

  // Encoder body plus head; the self-supervised head and mask embedding
  // take no part in CTC training.
  std::vector<nn::NamedTensor> CtcParameters() const;

 private:
  std::unique_ptr<ssl::SpeechEncoder> encoder_;
  nn::Linear head_;
};

struct AsrExample {
  std::string id;
  audio::FeatureMatrix features;
  std::string transcript;  // already normalized
};

struct FinetuneConfig {
  std::size_t epochs = 20;
  std::size_t max_steps = 0;  // 0 means no limit
  double lr = 1e-4;
  double batch_seconds = 16.0;
  // Encoder parameters stay fixed for this many initial steps.
  std::size_t freeze_encoder_steps = 0;
  // Training-set WER is measured every this many steps (0 = never).
  std::size_t eval_every_steps = 0;
  bool stop_at_zero_train_wer = false;
  std::size_t beam_width = 1;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

void to_json(nlohmann::json& j, const FinetuneConfig& c);
void from_json(const nlohmann::json& j, FinetuneConfig& c);

struct FinetuneResult {
  std::size_t steps = 0;
  std::vector<double> step_losses;
  std::vector<double> heldout_wer;  // one per epoch when a held-out set exists
  std::vector<std::pair<std::size_t, double>> train_wer;  // (step, WER)
  // First step at which the training WER was measured as 0, or -1.
  long first_zero_train_wer_step = -1;
};

// Throws VocabError when a transcript holds a symbol outside `vocab`.
FinetuneResult FinetuneCtc(AsrModel& model, const Vocab& vocab,
                           const std::vector<AsrExample>& train,
                           const std::vector<AsrExample>& heldout, const FinetuneConfig& cfg);

std::string Transcribe(const AsrModel& model, const Vocab& vocab,
                       const audio::FeatureMatrix& features, std::size_t beam_width = 1);

std::vector<std::string> TranscribeAll(const AsrModel& model, const Vocab& vocab,
                                       const std::vector<AsrExample>& examples,
                                       std::size_t beam_width = 1, int jobs = 1);

// Tensors encoder.* and ctc_head.*, with encoder_config and vocab metadata.
nn::Checkpoint AsrCheckpoint(const AsrModel& model, const Vocab& vocab);
std::pair<std::unique_ptr<AsrModel>, Vocab> LoadAsrModel(const nn::Checkpoint& ckpt);

// Encoder from either an encoder checkpoint or an ASR checkpoint.
std::unique_ptr<ssl::SpeechEncoder> LoadEncoderFromAny(const nn::Checkpoint& ckpt);

}  // namespace slmforge::asr
