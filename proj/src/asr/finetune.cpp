// src/asr/finetune.cpp

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

#include "slmforge/asr/finetune.hpp"

#include <numeric>

#include "slmforge/asr/ctc.hpp"
#include "slmforge/common/log.hpp"
#include "slmforge/common/parallel.hpp"
#include "slmforge/eval/metrics.hpp"
#include "slmforge/nn/adam.hpp"
#include "slmforge/ssl/pretrain.hpp"

namespace slmforge::asr {

AsrModel::AsrModel(std::unique_ptr<ssl::SpeechEncoder> encoder, std::size_t vocab_size, Rng& rng)
    : encoder_(std::move(encoder)), head_(encoder_->config().width, vocab_size, rng) {
  RegisterModule("encoder", encoder_.get());
  RegisterModule("ctc_head", &head_);
}

nn::Tensor AsrModel::LogProbs(const nn::Tensor& features) const {
  return nn::LogSoftmax(head_.Forward(encoder_->Forward(features).final));
}

nn::Tensor AsrModel::LogProbs(const audio::FeatureMatrix& features) const {
  return LogProbs(ssl::ToTensor(features));
}

std::vector<nn::NamedTensor> AsrModel::CtcParameters() const {
  std::vector<nn::NamedTensor> out;
  for (auto& p : encoder_->BodyParameters())
    if (p.tensor.requires_grad()) out.push_back({"encoder." + p.name, p.tensor});
  for (auto& p : head_.TrainableParameters()) out.push_back({"ctc_head." + p.name, p.tensor});
  return out;
}

void to_json(nlohmann::json& j, const FinetuneConfig& c) {
  j = nlohmann::json{{"epochs", c.epochs},
                     {"max_steps", c.max_steps},
                     {"lr", c.lr},
                     {"batch_seconds", c.batch_seconds},
                     {"freeze_encoder_steps", c.freeze_encoder_steps},
                     {"eval_every_steps", c.eval_every_steps},
                     {"stop_at_zero_train_wer", c.stop_at_zero_train_wer},
                     {"beam_width", c.beam_width},
                     {"seed", c.seed},
                     {"shuffle", c.shuffle}};
}

void from_json(const nlohmann::json& j, FinetuneConfig& c) {
  FinetuneConfig d;
  c.epochs = j.value("epochs", d.epochs);
  c.max_steps = j.value("max_steps", d.max_steps);
  c.lr = j.value("lr", d.lr);
  c.batch_seconds = j.value("batch_seconds", d.batch_seconds);
  c.freeze_encoder_steps = j.value("freeze_encoder_steps", d.freeze_encoder_steps);
  c.eval_every_steps = j.value("eval_every_steps", d.eval_every_steps);
  c.stop_at_zero_train_wer = j.value("stop_at_zero_train_wer", d.stop_at_zero_train_wer);
  c.beam_width = j.value("beam_width", d.beam_width);
  c.seed = j.value("seed", d.seed);
  c.shuffle = j.value("shuffle", d.shuffle);
}

std::string Transcribe(const AsrModel& model, const Vocab& vocab,
                       const audio::FeatureMatrix& features, std::size_t beam_width) {
  const nn::Tensor lp = model.LogProbs(features);
  return vocab.Decode(CtcBeamDecode(lp, beam_width));
}

std::vector<std::string> TranscribeAll(const AsrModel& model, const Vocab& vocab,
                                       const std::vector<AsrExample>& examples,
                                       std::size_t beam_width, int jobs) {
  std::vector<std::string> out(examples.size());
  ParallelFor(examples.size(), jobs, [&](std::size_t i) {
    out[i] = Transcribe(model, vocab, examples[i].features, beam_width);
  });
  return out;
}

namespace {

double CorpusWer(const AsrModel& model, const Vocab& vocab, const std::vector<AsrExample>& set,
                 std::size_t beam) {
  std::vector<std::string> refs;
  for (const auto& e : set) refs.push_back(e.transcript);
  return eval::Wer(refs, TranscribeAll(model, vocab, set, beam));
}

}  // namespace

FinetuneResult FinetuneCtc(AsrModel& model, const Vocab& vocab,
                           const std::vector<AsrExample>& train,
                           const std::vector<AsrExample>& heldout, const FinetuneConfig& cfg) {
  if (vocab.size() != model.vocab_size()) {
    throw ConfigError("vocab size " + std::to_string(vocab.size()) + " != CTC head size " +
                      std::to_string(model.vocab_size()));
  }
  if (!(cfg.batch_seconds > 0.0)) throw ConfigError("batch_seconds must be positive");
  struct Item {
    const AsrExample* ex;
    std::vector<int> target;
    double seconds;
  };
  std::vector<Item> items;
  for (const auto& e : train) {
    Item it{&e, vocab.Encode(e.transcript), static_cast<double>(e.features.rows) * e.features.frame_hop_s};
    const std::size_t frames = model.encoder().OutputFrames(e.features.rows);
    if (frames < CtcMinFrames(it.target) || frames == 0) {
      LogWarn("finetune: skipping ", e.id, ", ", frames, " frames cannot fit its transcript");
      continue;
    }
    items.push_back(std::move(it));
  }
  for (const auto& e : heldout) vocab.Encode(e.transcript);

  FinetuneResult result;
  if (cfg.epochs == 0) return result;
  if (items.empty()) throw ConfigError("finetune: no usable training examples");

  std::vector<nn::NamedTensor> params = model.CtcParameters();
  std::vector<nn::Tensor> body;
  for (const auto& p : params)
    if (p.name.rfind("encoder.", 0) == 0) body.push_back(p.tensor);
  auto set_body_trainable = [&](bool on) {
    for (auto& t : body) t.set_requires_grad(on);
  };
  nn::Adam adam(params, nn::AdamConfig{.lr = cfg.lr});
  if (cfg.freeze_encoder_steps > 0) set_body_trainable(false);

  std::vector<AsrExample> train_set;
  for (const auto& it : items) train_set.push_back(*it.ex);

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> durations(items.size());
  bool done = false;
  for (std::size_t epoch = 0; epoch < cfg.epochs && !done; ++epoch) {
    if (cfg.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
    }
    for (std::size_t i = 0; i < order.size(); ++i) durations[i] = items[order[i]].seconds;
    for (const auto& batch : ssl::AssembleBatches(durations, cfg.batch_seconds)) {
      if (cfg.max_steps && result.steps >= cfg.max_steps) {
        done = true;
        break;
      }
      if (cfg.freeze_encoder_steps > 0 && result.steps == cfg.freeze_encoder_steps) {
        set_body_trainable(true);
      }
      adam.ZeroGrad();
      nn::Tensor loss;
      for (std::size_t b : batch) {
        const Item& it = items[order[b]];
        nn::Tensor l = CtcLoss(model.LogProbs(it.ex->features), it.target);
        loss = b == batch.front() ? l : nn::Add(loss, l);
      }
      if (batch.size() > 1) loss = nn::Scale(loss, 1.0 / static_cast<double>(batch.size()));
      loss.Backward();
      adam.Step();
      ++result.steps;
      result.step_losses.push_back(loss.item());
      LogDebug("finetune step ", result.steps, " ctc loss ", loss.item());
      if (cfg.eval_every_steps && result.steps % cfg.eval_every_steps == 0) {
        const double w = CorpusWer(model, vocab, train_set, cfg.beam_width);
        result.train_wer.emplace_back(result.steps, w);
        LogInfo("finetune step ", result.steps, " train WER ", w);
        if (w == 0.0 && result.first_zero_train_wer_step < 0) {
          result.first_zero_train_wer_step = static_cast<long>(result.steps);
          if (cfg.stop_at_zero_train_wer) {
            done = true;
            break;
          }
        }
      }
    }
    if (!heldout.empty()) {
      const double w = CorpusWer(model, vocab, heldout, cfg.beam_width);
      result.heldout_wer.push_back(w);
      LogInfo("finetune epoch ", epoch, " held-out WER ", w);
    }
  }
  set_body_trainable(true);
  return result;
}

nn::Checkpoint AsrCheckpoint(const AsrModel& model, const Vocab& vocab) {
  nn::Checkpoint ckpt;
  ckpt.metadata["kind"] = "asr";
  ckpt.metadata["encoder_config"] = nlohmann::json(model.encoder().config()).dump();
  ckpt.metadata["vocab"] = vocab.Serialize();
  nn::AppendModule(ckpt, model);
  return ckpt;
}

std::pair<std::unique_ptr<AsrModel>, Vocab> LoadAsrModel(const nn::Checkpoint& ckpt) {
  if (ckpt.Meta("kind") != "asr") throw nn::CheckpointError("not an ASR checkpoint");
  Vocab vocab = Vocab::Parse(ckpt.Meta("vocab"));
  Rng rng(0);
  auto encoder = std::make_unique<ssl::SpeechEncoder>(ssl::EncoderConfigFromCheckpoint(ckpt), rng);
  auto model = std::make_unique<AsrModel>(std::move(encoder), vocab.size(), rng);
  nn::LoadModule(ckpt, *model, nn::LoadMode::kStrict);
  return {std::move(model), std::move(vocab)};
}

std::unique_ptr<ssl::SpeechEncoder> LoadEncoderFromAny(const nn::Checkpoint& ckpt) {
  const std::string kind = ckpt.Meta("kind");
  if (kind == "asr" || kind == "slm") return ssl::LoadEncoder(ckpt, "encoder.");
  return ssl::LoadEncoder(ckpt);
}

}  // namespace slmforge::asr
