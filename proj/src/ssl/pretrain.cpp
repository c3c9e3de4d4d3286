// src/ssl/pretrain.cpp

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

#include "slmforge/ssl/pretrain.hpp"

#include <algorithm>
#include <numeric>

#include "slmforge/common/error.hpp"
#include "slmforge/common/log.hpp"
#include "slmforge/common/parallel.hpp"
#include "slmforge/nn/adam.hpp"

namespace slmforge::ssl {

Utterance MakeUtterance(const std::string& id, const audio::AudioBuffer& buf,
                        const audio::SpectralConfig& spectral, audio::FeatureKind input_kind) {
  Utterance u;
  u.id = id;
  u.duration_s = buf.duration_s();
  audio::FeatureMatrix logmel = audio::LogMel(buf, spectral);
  u.mfcc = audio::Mfcc(logmel, spectral.n_mfcc);
  if (input_kind == audio::FeatureKind::kLogMel) {
    u.features = std::move(logmel);
  } else if (input_kind == audio::FeatureKind::kMfcc) {
    u.features = u.mfcc;
  } else {
    throw ConfigError("encoder input must be logmel or mfcc");
  }
  return u;
}

void PretrainConfig::Validate(const EncoderConfig& encoder) const {
  if (!(batch_seconds > 0.0)) throw ConfigError("batch_seconds must be positive");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (target_layer > encoder.layers) {
    throw ConfigError("target_layer " + std::to_string(target_layer) + " exceeds encoder depth " +
                      std::to_string(encoder.layers));
  }
  if (k == 0) throw ConfigError("k must be positive");
  if (k != encoder.num_classes) {
    throw ConfigError("k (" + std::to_string(k) + ") must equal encoder num_classes (" +
                      std::to_string(encoder.num_classes) + ")");
  }
  mask.Validate();
}

void to_json(nlohmann::json& j, const PretrainConfig& c) {
  j = nlohmann::json{{"epochs", c.epochs},
                     {"max_steps", c.max_steps},
                     {"lr", c.lr},
                     {"batch_seconds", c.batch_seconds},
                     {"target_layer", c.target_layer},
                     {"k", c.k},
                     {"kmeans_iters", c.kmeans_iters},
                     {"refresh_cycles", c.refresh_cycles},
                     {"mask_prob", c.mask.prob},
                     {"mask_span", c.mask.span},
                     {"mask_seed", c.mask.seed},
                     {"seed", c.seed},
                     {"shuffle", c.shuffle}};
}

void from_json(const nlohmann::json& j, PretrainConfig& c) {
  PretrainConfig d;
  c.epochs = j.value("epochs", d.epochs);
  c.max_steps = j.value("max_steps", d.max_steps);
  c.lr = j.value("lr", d.lr);
  c.batch_seconds = j.value("batch_seconds", d.batch_seconds);
  c.target_layer = j.value("target_layer", d.target_layer);
  c.k = j.value("k", d.k);
  c.kmeans_iters = j.value("kmeans_iters", d.kmeans_iters);
  c.refresh_cycles = j.value("refresh_cycles", d.refresh_cycles);
  c.mask.prob = j.value("mask_prob", d.mask.prob);
  c.mask.span = j.value("mask_span", d.mask.span);
  c.mask.seed = j.value("mask_seed", d.mask.seed);
  c.seed = j.value("seed", d.seed);
  c.shuffle = j.value("shuffle", d.shuffle);
}

std::vector<std::vector<std::size_t>> AssembleBatches(std::span<const double> durations,
                                                      double batch_seconds) {
  if (!(batch_seconds > 0.0)) throw ConfigError("batch_seconds must be positive");
  std::vector<std::vector<std::size_t>> batches;
  std::vector<std::size_t> current;
  double filled = 0.0;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    current.push_back(i);
    filled += durations[i];
    if (filled >= batch_seconds) {
      batches.push_back(std::move(current));
      current.clear();
      filled = 0.0;
    }
  }
  if (!current.empty()) batches.push_back(std::move(current));
  return batches;
}

audio::FeatureMatrix PoolFrames(const audio::FeatureMatrix& m, std::size_t stride) {
  if (stride == 0) throw ConfigError("pool stride must be positive");
  const std::size_t rows = m.rows / stride;
  audio::FeatureMatrix out(rows, m.cols, m.frame_hop_s * static_cast<double>(stride), m.kind);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t s = 0; s < stride; ++s) {
      const double* src = &m.data[(r * stride + s) * m.cols];
      for (std::size_t c = 0; c < m.cols; ++c) out.data[r * m.cols + c] += src[c];
    }
    for (std::size_t c = 0; c < m.cols; ++c) out.data[r * m.cols + c] /= static_cast<double>(stride);
  }
  return out;
}

namespace {

// Concatenates per-utterance matrices, fits, and splits labels back.
Codebook FitAndAssign(std::vector<Utterance>& data, const std::vector<audio::FeatureMatrix>& feats,
                      std::size_t k, int iters, std::uint64_t seed, audio::FeatureKind kind) {
  const std::size_t dim = feats.front().cols;
  std::vector<double> all;
  for (const auto& f : feats) {
    if (f.cols != dim) throw KMeansError("inconsistent feature dims across utterances");
    all.insert(all.end(), f.data.begin(), f.data.end());
  }
  Codebook cb = KMeansFit(PointSet{all, dim}, k, iters, seed, kind);
  for (std::size_t i = 0; i < data.size(); ++i) data[i].labels = AssignLabels(cb, feats[i]);
  return cb;
}

}  // namespace

Codebook MfccTargets(std::vector<Utterance>& data, std::size_t stride, std::size_t k, int iters,
                     std::uint64_t seed) {
  if (data.empty()) throw KMeansError("no utterances to cluster");
  std::vector<audio::FeatureMatrix> pooled;
  pooled.reserve(data.size());
  for (const auto& u : data) pooled.push_back(PoolFrames(u.mfcc, stride));
  return FitAndAssign(data, pooled, k, iters, seed, audio::FeatureKind::kMfcc);
}

Codebook RefreshTargets(const SpeechEncoder& encoder, std::vector<Utterance>& data,
                        std::size_t target_layer, std::size_t k, int iters, std::uint64_t seed,
                        int jobs) {
  if (data.empty()) throw KMeansError("no utterances to cluster");
  if (target_layer > encoder.config().layers) {
    throw ConfigError("target_layer " + std::to_string(target_layer) + " out of range");
  }
  std::vector<audio::FeatureMatrix> hidden(data.size());
  ParallelFor(data.size(), jobs, [&](std::size_t i) {
    EncoderOutput out = encoder.Forward(data[i].features);
    hidden[i] = ToFeatureMatrix(out.hidden[target_layer].Detach(), 0.0);
  });
  return FitAndAssign(data, hidden, k, iters, seed, audio::FeatureKind::kHidden);
}

nn::Tensor MaskedPredictionLoss(const SpeechEncoder& encoder, const nn::Tensor& features,
                                std::span<const int> labels, std::span<const std::uint8_t> mask) {
  const std::size_t frames = encoder.OutputFrames(features.dim(0));
  if (labels.size() != frames || mask.size() != frames) {
    throw nn::ShapeError("labels/mask must have " + std::to_string(frames) + " entries, got " +
                         std::to_string(labels.size()) + "/" + std::to_string(mask.size()));
  }
  EncoderOutput out = encoder.Forward(features, mask);
  return nn::CrossEntropy(encoder.PredictionLogits(out), labels, mask);
}

double EvaluateMaskedLoss(const SpeechEncoder& encoder, const std::vector<Utterance>& data,
                          const MaskSpec& mask) {
  if (data.empty()) return 0.0;
  Rng rng(mask.seed);
  double total = 0.0;
  for (const auto& u : data) {
    nn::Tensor x = ToTensor(u.features);
    auto m = SpanMask(encoder.OutputFrames(u.features.rows), mask, rng);
    total += MaskedPredictionLoss(encoder, x, u.labels, m).item();
  }
  return total / static_cast<double>(data.size());
}

PretrainResult Pretrain(SpeechEncoder& encoder, std::vector<Utterance>& data,
                        const PretrainConfig& cfg) {
  const EncoderConfig& ecfg = encoder.config();
  cfg.Validate(ecfg);
  PretrainResult result;
  if (cfg.epochs == 0) return result;

  std::vector<Utterance> usable;
  for (auto& u : data) {
    if (encoder.OutputFrames(u.features.rows) == 0) {
      LogWarn("pretrain: skipping ", u.id, ", too short for stride ", ecfg.TotalStride());
      continue;
    }
    usable.push_back(std::move(u));
  }
  data = std::move(usable);
  if (data.empty()) throw ConfigError("pretrain: no usable utterances");

  const bool need_targets = std::any_of(data.begin(), data.end(), [&](const Utterance& u) {
    return u.labels.size() != encoder.OutputFrames(u.features.rows);
  });
  if (need_targets) {
    result.codebooks.push_back(
        MfccTargets(data, ecfg.TotalStride(), cfg.k, cfg.kmeans_iters, cfg.seed));
  }

  Rng rng(cfg.seed);
  const std::size_t stages = cfg.refresh_cycles + 1;
  std::vector<double> durations(data.size());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t stage = 0; stage < stages; ++stage) {
    const std::size_t stage_epochs = cfg.epochs / stages + (stage < cfg.epochs % stages ? 1 : 0);
    if (stage_epochs == 0) break;
    if (cfg.max_steps && result.steps >= cfg.max_steps) break;
    if (stage > 0) {
      result.codebooks.push_back(RefreshTargets(encoder, data, cfg.target_layer, cfg.k,
                                                cfg.kmeans_iters, cfg.seed + stage, cfg.jobs));
      encoder.ResetPredictionHead(rng);
      LogInfo("pretrain: refreshed targets from layer ", cfg.target_layer);
    }
    nn::Adam adam(encoder.TrainableParameters(), nn::AdamConfig{.lr = cfg.lr});
    for (std::size_t epoch = 0; epoch < stage_epochs; ++epoch) {
      if (cfg.shuffle) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
      }
      for (std::size_t i = 0; i < order.size(); ++i) durations[i] = data[order[i]].duration_s;
      double epoch_loss = 0.0;
      std::size_t epoch_batches = 0;
      for (const auto& batch : AssembleBatches(durations, cfg.batch_seconds)) {
        if (cfg.max_steps && result.steps >= cfg.max_steps) break;
        adam.ZeroGrad();
        std::vector<nn::Tensor> losses;
        for (std::size_t b : batch) {
          const Utterance& u = data[order[b]];
          auto m = SpanMask(u.labels.size(), cfg.mask, rng);
          losses.push_back(MaskedPredictionLoss(encoder, ToTensor(u.features), u.labels, m));
        }
        nn::Tensor loss = losses[0];
        for (std::size_t i = 1; i < losses.size(); ++i) loss = nn::Add(loss, losses[i]);
        if (losses.size() > 1) loss = nn::Scale(loss, 1.0 / static_cast<double>(losses.size()));
        loss.Backward();
        adam.Step();
        ++result.steps;
        result.step_losses.push_back(loss.item());
        epoch_loss += loss.item();
        ++epoch_batches;
        LogDebug("pretrain step ", result.steps, " loss ", loss.item());
      }
      if (epoch_batches) {
        LogInfo("pretrain stage ", stage, " epoch ", epoch, " mean loss ",
                epoch_loss / static_cast<double>(epoch_batches));
      }
    }
  }
  return result;
}

PretrainResult ContinuedPretrain(const nn::Checkpoint& init, SpeechEncoder& encoder,
                                 std::vector<Utterance>& data, const PretrainConfig& cfg) {
  nn::LoadModule(init, encoder, nn::LoadMode::kStrict);
  return Pretrain(encoder, data, cfg);
}

nn::Checkpoint EncoderCheckpoint(const SpeechEncoder& encoder, const std::string& prefix) {
  nn::Checkpoint ckpt;
  ckpt.metadata["kind"] = "encoder";
  ckpt.metadata["encoder_config"] = nlohmann::json(encoder.config()).dump();
  nn::AppendModule(ckpt, encoder, prefix);
  return ckpt;
}

EncoderConfig EncoderConfigFromCheckpoint(const nn::Checkpoint& ckpt) {
  const std::string text = ckpt.Meta("encoder_config");
  if (text.empty()) throw nn::CheckpointError("checkpoint has no encoder_config metadata");
  return nlohmann::json::parse(text).get<EncoderConfig>();
}

std::unique_ptr<SpeechEncoder> LoadEncoder(const nn::Checkpoint& ckpt, const std::string& prefix) {
  Rng rng(0);
  auto encoder = std::make_unique<SpeechEncoder>(EncoderConfigFromCheckpoint(ckpt), rng);
  nn::LoadModule(ckpt, *encoder, nn::LoadMode::kStrict, prefix);
  return encoder;
}

}  // namespace slmforge::ssl
