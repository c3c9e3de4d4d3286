// src/ssl/encoder.cpp

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

#include "slmforge/ssl/encoder.hpp"

#include "slmforge/common/error.hpp"

namespace slmforge::ssl {

std::size_t EncoderConfig::TotalStride() const {
  std::size_t s = 1;
  for (auto v : conv_strides) s *= v;
  return s;
}

void EncoderConfig::Validate() const {
  if (input_dim == 0 || width == 0 || num_classes == 0) {
    throw ConfigError("encoder dims must be positive");
  }
  if (heads == 0 || width % heads != 0) throw ConfigError("encoder width must divide by heads");
  for (auto s : conv_strides)
    if (s == 0) throw ConfigError("conv strides must be positive");
}

void to_json(nlohmann::json& j, const EncoderConfig& c) {
  j = nlohmann::json{{"input_dim", c.input_dim},
                     {"input_kind", audio::FeatureKindName(c.input_kind)},
                     {"conv_strides", c.conv_strides},
                     {"conv_channels", c.conv_channels},
                     {"width", c.width},
                     {"layers", c.layers},
                     {"heads", c.heads},
                     {"ffn_width", c.ffn_width},
                     {"num_classes", c.num_classes}};
}

void from_json(const nlohmann::json& j, EncoderConfig& c) {
  EncoderConfig d;
  c.input_dim = j.value("input_dim", d.input_dim);
  c.input_kind = audio::ParseFeatureKind(j.value("input_kind", audio::FeatureKindName(d.input_kind)));
  c.conv_strides = j.value("conv_strides", d.conv_strides);
  c.conv_channels = j.value("conv_channels", d.conv_channels);
  c.width = j.value("width", d.width);
  c.layers = j.value("layers", d.layers);
  c.heads = j.value("heads", d.heads);
  c.ffn_width = j.value("ffn_width", d.ffn_width);
  c.num_classes = j.value("num_classes", d.num_classes);
}

Frontend::Frontend(const EncoderConfig& cfg, Rng& rng) {
  std::size_t channels = cfg.input_dim;
  for (std::size_t i = 0; i < cfg.conv_strides.size(); ++i) {
    const std::size_t s = cfg.conv_strides[i];
    convs_.push_back(std::make_unique<nn::Conv1dLayer>(channels, cfg.conv_channels, 2 * s, s, rng));
    RegisterModule("conv" + std::to_string(i), convs_.back().get());
    channels = cfg.conv_channels;
  }
  proj_ = std::make_unique<nn::Linear>(channels, cfg.width, rng);
  RegisterModule("proj", proj_.get());
}

nn::Tensor Frontend::Forward(const nn::Tensor& features) const {
  nn::Tensor x = features;
  for (const auto& conv : convs_) x = nn::Gelu(conv->Forward(x));
  return proj_->Forward(x);
}

void Frontend::MakeIdentity() {
  if (!convs_.empty() || proj_->in_features() != proj_->out_features()) {
    throw ConfigError("identity front-end needs no conv layers and input_dim == width");
  }
  const std::size_t n = proj_->in_features();
  auto w = proj_->weight().mutable_values();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i * n + j] = i == j ? 1.0 : 0.0;
  auto b = proj_->bias().mutable_values();
  std::fill(b.begin(), b.end(), 0.0);
  SetFrozen(true);
}

SpeechEncoder::SpeechEncoder(const EncoderConfig& cfg, Rng& rng)
    : cfg_((cfg.Validate(), cfg)), frontend_(cfg, rng), final_ln_(cfg.width) {
  RegisterModule("frontend", &frontend_);
  mask_embedding_ = RegisterParameter("mask_embedding", nn::InitWeight({cfg.width}, rng));
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    blocks_.push_back(std::make_unique<nn::TransformerBlock>(cfg.width, cfg.heads, cfg.ffn_width, rng));
    RegisterModule("block" + std::to_string(l), blocks_.back().get());
  }
  RegisterModule("final_ln", &final_ln_);
  head_ = std::make_unique<nn::Linear>(cfg.width, cfg.num_classes, rng);
  RegisterModule("head", head_.get());
}

std::size_t SpeechEncoder::OutputFrames(std::size_t input_frames) const {
  std::size_t t = input_frames;
  for (auto s : cfg_.conv_strides) t /= s;
  return t;
}

EncoderOutput SpeechEncoder::Forward(const nn::Tensor& features,
                                     std::span<const std::uint8_t> mask) const {
  if (features.rank() != 2 || features.dim(1) != cfg_.input_dim) {
    throw nn::ShapeError("encoder expects T x " + std::to_string(cfg_.input_dim) + " input, got " +
                         nn::ShapeString(features.shape()));
  }
  EncoderOutput out;
  nn::Tensor x = frontend_.Forward(features);
  const std::size_t t = x.dim(0);
  if (t == 0) {
    throw nn::ShapeError("input of " + std::to_string(features.dim(0)) +
                         " frames is too short for total stride " +
                         std::to_string(cfg_.TotalStride()));
  }
  out.hidden.push_back(x);
  if (!mask.empty()) {
    if (mask.size() != t) {
      throw nn::ShapeError("mask length " + std::to_string(mask.size()) + " != " +
                           std::to_string(t) + " output frames");
    }
    x = nn::ReplaceRows(x, mask, mask_embedding_);
  }
  x = nn::Add(x, nn::SinusoidalPositions(t, cfg_.width));
  for (const auto& block : blocks_) {
    x = block->Forward(x, /*causal=*/false);
    out.hidden.push_back(x);
  }
  out.final = final_ln_.Forward(x);
  return out;
}

EncoderOutput SpeechEncoder::Forward(const audio::FeatureMatrix& features,
                                     std::span<const std::uint8_t> mask) const {
  return Forward(ToTensor(features), mask);
}

nn::Tensor SpeechEncoder::PredictionLogits(const EncoderOutput& out) const {
  return head_->Forward(out.final);
}

std::vector<nn::NamedTensor> SpeechEncoder::BodyParameters() const {
  std::vector<nn::NamedTensor> out;
  for (auto& p : Parameters()) {
    if (p.name == "mask_embedding" || p.name.rfind("head.", 0) == 0) continue;
    out.push_back(p);
  }
  return out;
}

void SpeechEncoder::ResetPredictionHead(Rng& rng) {
  auto w = head_->weight().mutable_values();
  for (auto& v : w) v = rng.TruncatedNormal(0.02);
  auto b = head_->bias().mutable_values();
  std::fill(b.begin(), b.end(), 0.0);
}

nn::Tensor ToTensor(const audio::FeatureMatrix& m) {
  return nn::Tensor::Constant(m.data, {m.rows, m.cols});
}

audio::FeatureMatrix ToFeatureMatrix(const nn::Tensor& t, double hop_s, audio::FeatureKind kind) {
  audio::FeatureMatrix m(t.dim(0), t.dim(1), hop_s, kind);
  const auto v = t.values();
  std::copy(v.begin(), v.end(), m.data.begin());
  return m;
}

audio::FeatureMatrix ComputeInputFeatures(const audio::AudioBuffer& buf,
                                          const audio::SpectralConfig& spectral,
                                          audio::FeatureKind kind) {
  audio::FeatureMatrix logmel = audio::LogMel(buf, spectral);
  if (kind == audio::FeatureKind::kLogMel) return logmel;
  if (kind == audio::FeatureKind::kMfcc) return audio::Mfcc(logmel, spectral.n_mfcc);
  throw ConfigError("encoder input must be logmel or mfcc");
}

}  // namespace slmforge::ssl
