// src/slm/fusion.cpp

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

#include "slmforge/slm/fusion.hpp"

#include <algorithm>
#include <numeric>

#include "slmforge/common/error.hpp"
#include "slmforge/common/log.hpp"
#include "slmforge/common/text.hpp"
#include "slmforge/nn/adam.hpp"
#include "slmforge/ssl/pretrain.hpp"
#include "slmforge/slm/tokenizer.hpp"

namespace slmforge::slm {

SpeechLlm::SpeechLlm(std::unique_ptr<ssl::SpeechEncoder> encoder, std::unique_ptr<CausalLm> lm,
                     std::vector<std::size_t> layers, std::size_t aligner_hidden, Rng& rng)
    : encoder_(std::move(encoder)),
      lm_(std::move(lm)),
      layers_(layers.empty() ? DefaultLayers(*encoder_) : std::move(layers)),
      aligner_(layers_.size() * encoder_->config().width,
               aligner_hidden ? aligner_hidden : 4 * lm_->config().width, lm_->config().width,
               rng) {
  for (auto l : layers_) {
    if (l > encoder_->config().layers) {
      throw ConfigError("layer index " + std::to_string(l) + " outside the encoder");
    }
  }
  RegisterModule("encoder", encoder_.get());
  RegisterModule("lm", lm_.get());
  RegisterModule("aligner", &aligner_);
}

void SpeechLlm::FreezeBackbones() {
  encoder_->SetFrozen(true);
  lm_->SetFrozen(true);
}

audio::FeatureMatrix SpeechLlm::SpeechFeatures(const audio::FeatureMatrix& input) const {
  return ExtractMultilayerFeatures(*encoder_, input, layers_);
}

std::size_t PlaceholderIndex(const std::vector<int>& tokens) {
  const auto n = std::count(tokens.begin(), tokens.end(), ByteTokenizer::kAudio);
  if (n != 1) {
    throw ConfigError("sequence must hold exactly one audio placeholder, found " + std::to_string(n));
  }
  return static_cast<std::size_t>(std::find(tokens.begin(), tokens.end(), ByteTokenizer::kAudio) -
                                  tokens.begin());
}

nn::Tensor FuseEmbeddings(const SpeechLlm& model, const std::vector<int>& tokens,
                          const audio::FeatureMatrix& speech) {
  const std::size_t p = PlaceholderIndex(tokens);
  if (speech.rows == 0) throw nn::ShapeError("speech features are empty");
  nn::Tensor text = model.lm().Embed(tokens);
  nn::Tensor aligned = model.aligner().Forward(ssl::ToTensor(speech));
  std::vector<nn::Tensor> parts;
  if (p > 0) parts.push_back(nn::SliceRows(text, 0, p));
  parts.push_back(aligned);
  if (p + 1 < tokens.size()) parts.push_back(nn::SliceRows(text, p + 1, tokens.size() - p - 1));
  return nn::ConcatRows(parts);
}

nn::Tensor FusionLoss(const SpeechLlm& model, const std::vector<int>& tokens,
                      const std::vector<std::uint8_t>& loss_mask,
                      const audio::FeatureMatrix& speech) {
  if (loss_mask.size() != tokens.size()) throw nn::ShapeError("loss mask length mismatch");
  const std::size_t p = PlaceholderIndex(tokens);
  const std::size_t t_speech = speech.rows;
  nn::Tensor fused = FuseEmbeddings(model, tokens, speech);
  nn::Tensor logits = model.lm().ForwardEmbeddings(fused);
  const std::size_t len = fused.dim(0);
  std::vector<int> targets(len, 0);
  std::vector<std::uint8_t> mask(len, 0);
  // Text token j sits at fused row j before the placeholder and at
  // j - 1 + T' after it; it is predicted from the row just before.
  for (std::size_t j = 1; j < tokens.size(); ++j) {
    if (j == p || !loss_mask[j]) continue;
    const std::size_t row = j < p ? j : j - 1 + t_speech;
    targets[row - 1] = tokens[j];
    mask[row - 1] = 1;
  }
  return nn::CrossEntropy(logits, targets, mask);
}

void to_json(nlohmann::json& j, const FusionConfig& c) {
  j = nlohmann::json{{"steps", c.steps}, {"batch_size", c.batch_size}, {"lr", c.lr}, {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, FusionConfig& c) {
  FusionConfig d;
  c.steps = j.value("steps", d.steps);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.lr = j.value("lr", d.lr);
  c.seed = j.value("seed", d.seed);
}

std::vector<double> TrainAligner(SpeechLlm& model, const std::vector<FusionSample>& samples,
                                 const FusionConfig& cfg) {
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be positive");
  model.FreezeBackbones();
  std::vector<double> losses;
  if (cfg.steps == 0) return losses;
  if (samples.empty()) throw ConfigError("aligner training needs at least one sample");
  nn::Adam adam(model.aligner().TrainableParameters(), nn::AdamConfig{.lr = cfg.lr});
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    adam.ZeroGrad();
    nn::Tensor loss;
    for (std::size_t b = 0; b < cfg.batch_size; ++b) {
      if (cursor == order.size()) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
        cursor = 0;
      }
      const FusionSample& s = samples[order[cursor++]];
      nn::Tensor l = FusionLoss(model, s.tokens, s.loss_mask, s.speech);
      loss = b == 0 ? l : nn::Add(loss, l);
    }
    loss = nn::Scale(loss, 1.0 / static_cast<double>(cfg.batch_size));
    loss.Backward();
    adam.Step();
    losses.push_back(loss.item());
    if ((step + 1) % 100 == 0) LogDebug("aligner step ", step + 1, " loss ", loss.item());
  }
  return losses;
}

GenerateResult Generate(const SpeechLlm& model, const audio::FeatureMatrix& speech, CotMode mode,
                        std::size_t max_tokens) {
  std::vector<int> tokens = ByteTokenizer::Encode(RenderPrompt(mode));
  std::vector<int> produced;
  GenerateResult result;
  result.truncated = true;
  for (std::size_t i = 0; i < max_tokens; ++i) {
    nn::Tensor logits = model.lm().ForwardEmbeddings(FuseEmbeddings(model, tokens, speech));
    const auto v = logits.values();
    const std::size_t V = logits.dim(1);
    const double* row = v.data() + (logits.dim(0) - 1) * V;
    const int next = static_cast<int>(std::max_element(row, row + V) - row);
    if (next == ByteTokenizer::kEnd) {
      result.truncated = false;
      break;
    }
    produced.push_back(next);
    tokens.push_back(next);
  }
  result.text = ByteTokenizer::Decode(produced);
  return result;
}

nn::Checkpoint SlmCheckpoint(const SpeechLlm& model) {
  nn::Checkpoint ckpt;
  ckpt.metadata["kind"] = "slm";
  ckpt.metadata["encoder_config"] = nlohmann::json(model.encoder().config()).dump();
  ckpt.metadata["lm_config"] = nlohmann::json(model.lm().config()).dump();
  ckpt.metadata["layers"] = nlohmann::json(model.layers()).dump();
  ckpt.metadata["aligner_hidden"] = std::to_string(model.aligner().hidden_dim());
  nn::AppendModule(ckpt, model);
  return ckpt;
}

std::unique_ptr<SpeechLlm> LoadSpeechLlm(const nn::Checkpoint& ckpt) {
  if (ckpt.Meta("kind") != "slm") throw nn::CheckpointError("not a speech LLM checkpoint");
  Rng rng(0);
  auto encoder = std::make_unique<ssl::SpeechEncoder>(ssl::EncoderConfigFromCheckpoint(ckpt), rng);
  auto lm = std::make_unique<CausalLm>(nlohmann::json::parse(ckpt.Meta("lm_config")).get<LmConfig>(), rng);
  auto layers = nlohmann::json::parse(ckpt.Meta("layers")).get<std::vector<std::size_t>>();
  auto model = std::make_unique<SpeechLlm>(std::move(encoder), std::move(lm), layers,
                                           std::stoul(ckpt.Meta("aligner_hidden", "0")), rng);
  nn::LoadModule(ckpt, *model, nn::LoadMode::kStrict);
  model->FreezeBackbones();
  return model;
}

nn::Checkpoint LmCheckpoint(const CausalLm& lm) {
  nn::Checkpoint ckpt;
  ckpt.metadata["kind"] = "lm";
  ckpt.metadata["lm_config"] = nlohmann::json(lm.config()).dump();
  nn::AppendModule(ckpt, lm);
  return ckpt;
}

std::unique_ptr<CausalLm> LoadLm(const nn::Checkpoint& ckpt, const std::string& prefix) {
  const std::string text = ckpt.Meta("lm_config");
  if (text.empty()) throw nn::CheckpointError("checkpoint has no lm_config metadata");
  Rng rng(0);
  auto lm = std::make_unique<CausalLm>(nlohmann::json::parse(text).get<LmConfig>(), rng);
  nn::LoadModule(ckpt, *lm, nn::LoadMode::kStrict, prefix);
  return lm;
}

}  // namespace slmforge::slm
