// include/slmforge/ssl/encoder.hpp

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
#include "slmforge/nn/layers.hpp"

namespace slmforge::ssl {

struct EncoderConfig {
  std::size_t input_dim = 40;
  audio::FeatureKind input_kind = audio::FeatureKind::kLogMel;
  // One conv + GELU per entry; kernel = 2 * stride.
  std::vector<std::size_t> conv_strides = {2};
  std::size_t conv_channels = 64;
  std::size_t width = 32;
  std::size_t layers = 2;
  std::size_t heads = 2;
  std::size_t ffn_width = 64;
  std::size_t num_classes = 32;

  std::size_t TotalStride() const;
  void Validate() const;
};

void to_json(nlohmann::json& j, const EncoderConfig& c);
void from_json(const nlohmann::json& j, EncoderConfig& c);

// Conv stack followed by a linear projection to the encoder width.
class Frontend : public nn::Module {
 public:
  Frontend(const EncoderConfig& cfg, Rng& rng);
  nn::Tensor Forward(const nn::Tensor& features) const;
  std::size_t num_convs() const { return convs_.size(); }
  // Sets the projection to the identity and freezes it. Requires no conv
  // layers and input_dim == width.
  void MakeIdentity();

 private:
  std::vector<std::unique_ptr<nn::Conv1dLayer>> convs_;
  std::unique_ptr<nn::Linear> proj_;
};

struct EncoderOutput {
  // hidden[0] is the front-end output, hidden[l] the output of block l.
  std::vector<nn::Tensor> hidden;
  // Final layer norm applied to hidden.back().
  nn::Tensor final;
};

// HuBERT-style encoder over frame features: front-end at total stride S,
// learned mask embedding, sinusoidal positions, pre-LN transformer blocks,
// and a prediction head onto num_classes cluster ids.
class SpeechEncoder : public nn::Module {
 public:
  SpeechEncoder(const EncoderConfig& cfg, Rng& rng);

  const EncoderConfig& config() const { return cfg_; }
  std::size_t OutputFrames(std::size_t input_frames) const;

  // features: T x input_dim. mask (empty or one entry per output frame)
  // marks front-end frames replaced by the mask embedding.
  EncoderOutput Forward(const nn::Tensor& features, std::span<const std::uint8_t> mask = {}) const;
  EncoderOutput Forward(const audio::FeatureMatrix& features,
                        std::span<const std::uint8_t> mask = {}) const;

  nn::Tensor PredictionLogits(const EncoderOutput& out) const;

  // Parameters used by downstream heads: everything but the mask embedding
  // and the prediction head.
  std::vector<nn::NamedTensor> BodyParameters() const;

  Frontend& frontend() { return frontend_; }
  nn::Linear& prediction_head() { return *head_; }
  void ResetPredictionHead(Rng& rng);

 private:
  EncoderConfig cfg_;
  Frontend frontend_;
  nn::Tensor mask_embedding_;
  std::vector<std::unique_ptr<nn::TransformerBlock>> blocks_;
  nn::LayerNormLayer final_ln_;
  std::unique_ptr<nn::Linear> head_;
};

nn::Tensor ToTensor(const audio::FeatureMatrix& m);
audio::FeatureMatrix ToFeatureMatrix(const nn::Tensor& t, double hop_s,
                                     audio::FeatureKind kind = audio::FeatureKind::kHidden);

// Encoder input features of the configured kind.
audio::FeatureMatrix ComputeInputFeatures(const audio::AudioBuffer& buf,
                                          const audio::SpectralConfig& spectral,
                                          audio::FeatureKind kind);

}  // namespace slmforge::ssl
