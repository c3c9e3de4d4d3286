// include/slmforge/ssl/pretrain.hpp

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
#include <string>
#include <vector>

#include <json.hpp>

#include "slmforge/audio/audio.hpp"
#include "slmforge/audio/spectral.hpp"
#include "slmforge/nn/checkpoint.hpp"
#include "slmforge/ssl/encoder.hpp"
#include "slmforge/ssl/kmeans.hpp"
#include "slmforge/ssl/masking.hpp"

namespace slmforge::ssl {

struct Utterance {
  std::string id;
  double duration_s = 0.0;
  audio::FeatureMatrix features;  // encoder input
  audio::FeatureMatrix mfcc;      // first-stage clustering features
  std::vector<int> labels;        // one per encoder output frame
};

Utterance MakeUtterance(const std::string& id, const audio::AudioBuffer& buf,
                        const audio::SpectralConfig& spectral, audio::FeatureKind input_kind);

struct PretrainConfig {
  std::size_t epochs = 33;
  // Stop after this many optimizer steps in total; 0 means no limit.
  std::size_t max_steps = 0;
  double lr = 5e-4;
  double batch_seconds = 87.5;
  std::size_t target_layer = 1;
  std::size_t k = 32;
  int kmeans_iters = 50;
  // Number of hidden-feature refreshes. The epochs are split evenly over
  // refresh_cycles + 1 stages, the first trained on MFCC targets.
  std::size_t refresh_cycles = 1;
  MaskSpec mask;
  std::uint64_t seed = 0;
  bool shuffle = true;
  int jobs = 1;

  void Validate(const EncoderConfig& encoder) const;
};

void to_json(nlohmann::json& j, const PretrainConfig& c);
void from_json(const nlohmann::json& j, PretrainConfig& c);

// Greedy fill in order: a batch closes as soon as its audio reaches
// batch_seconds.
std::vector<std::vector<std::size_t>> AssembleBatches(std::span<const double> durations,
                                                      double batch_seconds);

// Mean of each run of `stride` frames; trailing frames that do not fill a
// run are dropped.
audio::FeatureMatrix PoolFrames(const audio::FeatureMatrix& m, std::size_t stride);

// Fits a codebook on stride-pooled MFCC frames and labels every utterance.
Codebook MfccTargets(std::vector<Utterance>& data, std::size_t stride, std::size_t k, int iters,
                     std::uint64_t seed);

// Runs the encoder unmasked, clusters hidden[target_layer] and relabels every
// utterance.
Codebook RefreshTargets(const SpeechEncoder& encoder, std::vector<Utterance>& data,
                        std::size_t target_layer, std::size_t k, int iters, std::uint64_t seed,
                        int jobs = 1);

// Cross-entropy of the prediction head at masked frames only.
nn::Tensor MaskedPredictionLoss(const SpeechEncoder& encoder, const nn::Tensor& features,
                                std::span<const int> labels, std::span<const std::uint8_t> mask);

// Mean masked-prediction loss with masks drawn from mask.seed, independent of
// any training state.
double EvaluateMaskedLoss(const SpeechEncoder& encoder, const std::vector<Utterance>& data,
                          const MaskSpec& mask);

struct PretrainResult {
  std::size_t steps = 0;
  std::vector<double> step_losses;
  std::vector<Codebook> codebooks;
};

// Trains from the current weights with a fresh optimizer. Utterances without
// labels get MFCC targets first.
PretrainResult Pretrain(SpeechEncoder& encoder, std::vector<Utterance>& data,
                        const PretrainConfig& cfg);

// Strict load of `init` into `encoder`, then Pretrain.
PretrainResult ContinuedPretrain(const nn::Checkpoint& init, SpeechEncoder& encoder,
                                 std::vector<Utterance>& data, const PretrainConfig& cfg);

// Encoder weights plus its config under metadata "encoder_config".
nn::Checkpoint EncoderCheckpoint(const SpeechEncoder& encoder, const std::string& prefix = "");
EncoderConfig EncoderConfigFromCheckpoint(const nn::Checkpoint& ckpt);
std::unique_ptr<SpeechEncoder> LoadEncoder(const nn::Checkpoint& ckpt,
                                           const std::string& prefix = "");

}  // namespace slmforge::ssl
