// src/cli/commands.cpp

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

#include "slmforge/cli/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include "slmforge/asr/finetune.hpp"
#include "slmforge/asr/normalize.hpp"
#include "slmforge/audio/wav.hpp"
#include "slmforge/cli/config.hpp"
#include "slmforge/common/log.hpp"
#include "slmforge/common/text.hpp"
#include "slmforge/curate/pipeline.hpp"
#include "slmforge/eval/metrics.hpp"
#include "slmforge/eval/report.hpp"
#include "slmforge/slm/fusion.hpp"
#include "slmforge/slm/instruction.hpp"
#include "slmforge/ssl/pretrain.hpp"

namespace slmforge::cli {
namespace {

struct GlobalOptions {
  std::string config;
  std::uint64_t seed = 0;
  int jobs = 1;
  int sample_rate = 16000;
  bool deterministic = false;
  bool verbose = false;
  bool quiet = false;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
  CLI::Option* rate_opt = nullptr;

  RunConfig Resolve() const {
    return ResolveRunConfig(config, seed_opt->count() ? std::optional(seed) : std::nullopt,
                            jobs_opt->count() ? std::optional(jobs) : std::nullopt, deterministic,
                            rate_opt->count() ? std::optional(sample_rate) : std::nullopt);
  }
};

class AudioCache {
 public:
  explicit AudioCache(int rate) : rate_(rate) {}
  const audio::AudioBuffer& File(const std::string& path) {
    auto it = files_.find(path);
    if (it == files_.end()) it = files_.emplace(path, audio::Resample(audio::ReadWav(path), rate_)).first;
    return it->second;
  }
  audio::AudioBuffer Record(const curate::SegmentRecord& r) {
    const auto& buf = File(r.source_path);
    return r.duration_s > 0.0 ? buf.Slice(r.offset_s, r.duration_s) : buf;
  }

 private:
  int rate_;
  std::map<std::string, audio::AudioBuffer> files_;
};

void AddRunMetadata(nn::Checkpoint& ckpt, const ResolvedConfig& resolved,
                    const audio::SpectralConfig& spectral, int sample_rate) {
  ckpt.metadata["run_config"] = resolved.json.dump();
  ckpt.metadata["run_config_hash"] = resolved.hash;
  ckpt.metadata["spectral"] = SpectralToJson(spectral).dump();
  ckpt.metadata["sample_rate"] = std::to_string(sample_rate);
}

audio::SpectralConfig SpectralOf(const nn::Checkpoint& ckpt, const RunConfig& run) {
  const std::string s = ckpt.Meta("spectral");
  return s.empty() ? SpectralFromJson(run.Section("spectral")) : SpectralFromJson(nlohmann::json::parse(s));
}

int RateOf(const nn::Checkpoint& ckpt, const RunConfig& run) {
  const std::string s = ckpt.Meta("sample_rate");
  return s.empty() ? run.sample_rate : std::stoi(s);
}

void LogResolved(const ResolvedConfig& r) {
  LogInfo("resolved config ", r.json.dump(), " hash ", r.hash);
}

asr::NormalizationRules RulesFrom(const RunConfig& run, const std::string& lexicon_flag) {
  const auto text = run.Section("text");
  const std::string lexicon = lexicon_flag.empty() ? text.value("lexicon", "") : lexicon_flag;
  asr::NormalizationRules rules = asr::LoadRules(lexicon, text.value("punctuation", ""));
  if (lexicon.empty()) rules.spell_digits = false;
  return rules;
}

std::vector<std::string> ReadLines(const std::string& path) {
  auto lines = SplitString(ReadFile(path), '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& l : lines)
    if (!l.empty() && l.back() == '\r') l.pop_back();
  return lines;
}

// ---------------------------------------------------------------- curate

struct CurateOptions {
  std::string out;
  std::vector<std::string> inputs;
};

int Curate(const GlobalOptions& g, const CurateOptions& o) {
  const RunConfig run = g.Resolve();
  curate::PipelineConfig cfg = run.Section("curate").get<curate::PipelineConfig>();
  cfg.sample_rate = run.sample_rate;
  cfg.jobs = run.jobs;
  const ResolvedConfig resolved = Resolve("curate", run, nlohmann::json(cfg));
  LogResolved(resolved);
  curate::Manifest m = curate::RunPipeline(o.inputs, cfg);
  m.header.config = resolved.json;
  m.header.config_hash = resolved.hash;
  curate::WriteManifest(o.out, m);
  LogInfo("curate: ", m.records.size(), " of ", m.header.candidates, " candidate segments kept, ",
          m.header.total_hours, " h");
  return 0;
}

// -------------------------------------------------------------- pretrain

struct PretrainOptions {
  std::string manifest, init, out, codebook_out;
  long steps = -1;
};

int Pretrain(const GlobalOptions& g, const PretrainOptions& o) {
  const RunConfig run = g.Resolve();
  audio::SpectralConfig spectral = SpectralFromJson(run.Section("spectral"));
  int rate = run.sample_rate;
  std::unique_ptr<ssl::SpeechEncoder> encoder;
  if (!o.init.empty()) {
    const nn::Checkpoint init = nn::ReadCheckpoint(o.init);
    encoder = asr::LoadEncoderFromAny(init);
    spectral = SpectralOf(init, run);
    rate = RateOf(init, run);
    LogInfo("pretrain: continuing from ", o.init);
  } else {
    ssl::EncoderConfig ecfg = run.Section("encoder").get<ssl::EncoderConfig>();
    if (!run.Section("encoder").contains("input_dim")) {
      ecfg.input_dim = static_cast<std::size_t>(
          ecfg.input_kind == audio::FeatureKind::kMfcc ? spectral.n_mfcc : spectral.n_mels);
    }
    Rng rng(run.seed);
    encoder = std::make_unique<ssl::SpeechEncoder>(ecfg, rng);
  }
  nlohmann::json psec = run.Section("pretrain");
  ssl::PretrainConfig pcfg = psec.get<ssl::PretrainConfig>();
  if (!psec.contains("k")) pcfg.k = encoder->config().num_classes;
  pcfg.seed = run.seed;
  pcfg.jobs = run.jobs;
  if (o.steps >= 0) pcfg.max_steps = static_cast<std::size_t>(o.steps);
  if (o.steps == 0) pcfg.epochs = 0;

  const ResolvedConfig resolved =
      Resolve("pretrain", run,
              {{"pretrain", pcfg}, {"encoder", encoder->config()}, {"spectral", SpectralToJson(spectral)},
               {"init", o.init}, {"manifest", o.manifest}});
  LogResolved(resolved);

  const auto manifest = curate::ReadManifest(o.manifest);
  AudioCache cache(rate);
  std::vector<ssl::Utterance> data;
  for (const auto& r : manifest.records) {
    data.push_back(ssl::MakeUtterance(r.id, cache.Record(r), spectral, encoder->config().input_kind));
  }
  const ssl::PretrainResult result = ssl::Pretrain(*encoder, data, pcfg);
  nn::Checkpoint ckpt = ssl::EncoderCheckpoint(*encoder);
  AddRunMetadata(ckpt, resolved, spectral, rate);
  ckpt.metadata["steps"] = std::to_string(result.steps);
  if (!result.step_losses.empty()) {
    ckpt.metadata["final_loss"] = nlohmann::json(result.step_losses.back()).dump();
  }
  nn::WriteCheckpoint(o.out, ckpt);
  if (!o.codebook_out.empty() && !result.codebooks.empty()) {
    nn::Checkpoint cb = ssl::CodebookToCheckpoint(result.codebooks.back());
    cb.metadata["run_config_hash"] = resolved.hash;
    nn::WriteCheckpoint(o.codebook_out, cb);
  }
  LogInfo("pretrain: ", result.steps, " steps, wrote ", o.out);
  return 0;
}

// ---------------------------------------------------------- finetune-asr

struct FinetuneOptions {
  std::string init, manifest, out, vocab, vocab_out, lexicon;
  long steps = -1;
};

int FinetuneAsr(const GlobalOptions& g, const FinetuneOptions& o) {
  const RunConfig run = g.Resolve();
  const nn::Checkpoint init = nn::ReadCheckpoint(o.init);
  auto encoder = asr::LoadEncoderFromAny(init);
  const audio::SpectralConfig spectral = SpectralOf(init, run);
  const int rate = RateOf(init, run);
  const asr::NormalizationRules rules = RulesFrom(run, o.lexicon);

  asr::FinetuneConfig fcfg = run.Section("finetune").get<asr::FinetuneConfig>();
  fcfg.seed = run.seed;
  if (o.steps >= 0) fcfg.max_steps = static_cast<std::size_t>(o.steps);
  if (o.steps == 0) fcfg.epochs = 0;

  const auto manifest = curate::ReadManifest(o.manifest);
  AudioCache cache(rate);
  std::vector<asr::AsrExample> train, heldout;
  std::vector<std::string> texts;
  for (const auto& r : manifest.records) {
    if (!r.transcript) {
      LogWarn("finetune-asr: ", r.id, " has no transcript, skipped");
      continue;
    }
    asr::AsrExample e;
    e.id = r.id;
    e.transcript = asr::NormalizeText(*r.transcript, rules);
    e.features = ssl::ComputeInputFeatures(cache.Record(r), spectral, encoder->config().input_kind);
    texts.push_back(e.transcript);
    (r.split == curate::Split::kTest ? heldout : train).push_back(std::move(e));
  }
  const asr::Vocab vocab = o.vocab.empty() ? asr::Vocab::FromTexts(texts) : asr::Vocab::Load(o.vocab);
  if (!o.vocab_out.empty()) vocab.Save(o.vocab_out);

  const ResolvedConfig resolved =
      Resolve("finetune-asr", run,
              {{"finetune", fcfg}, {"init", o.init}, {"manifest", o.manifest},
               {"vocab_size", vocab.size()}, {"spell_digits", rules.spell_digits}});
  LogResolved(resolved);

  Rng rng(run.seed);
  asr::AsrModel model(std::move(encoder), vocab.size(), rng);
  const asr::FinetuneResult result = asr::FinetuneCtc(model, vocab, train, heldout, fcfg);
  nn::Checkpoint ckpt = asr::AsrCheckpoint(model, vocab);
  AddRunMetadata(ckpt, resolved, spectral, rate);
  ckpt.metadata["steps"] = std::to_string(result.steps);
  nn::WriteCheckpoint(o.out, ckpt);
  LogInfo("finetune-asr: ", result.steps, " steps, wrote ", o.out);
  return 0;
}

// ------------------------------------------------------------ transcribe

struct TranscribeOptions {
  std::string ckpt, wav, manifest, out, refs_out;
  std::size_t beam = 1;
};

int TranscribeCmd(const GlobalOptions& g, const TranscribeOptions& o) {
  const RunConfig run = g.Resolve();
  if (o.wav.empty() == o.manifest.empty()) throw UsageError("give exactly one of --wav or --manifest");
  const nn::Checkpoint ckpt = nn::ReadCheckpoint(o.ckpt);
  auto [model, vocab] = asr::LoadAsrModel(ckpt);
  const audio::SpectralConfig spectral = SpectralOf(ckpt, run);
  const int rate = RateOf(ckpt, run);
  const auto kind = model->encoder().config().input_kind;
  if (!o.wav.empty()) {
    const auto buf = audio::Resample(audio::ReadWav(o.wav), rate);
    std::cout << asr::Transcribe(*model, vocab, ssl::ComputeInputFeatures(buf, spectral, kind), o.beam)
              << "\n";
    return 0;
  }
  const auto manifest = curate::ReadManifest(o.manifest);
  AudioCache cache(rate);
  std::vector<asr::AsrExample> examples;
  for (const auto& r : manifest.records) {
    asr::AsrExample e;
    e.id = r.id;
    e.transcript = r.transcript.value_or("");
    e.features = ssl::ComputeInputFeatures(cache.Record(r), spectral, kind);
    examples.push_back(std::move(e));
  }
  const auto hyps = asr::TranscribeAll(*model, vocab, examples, o.beam, run.jobs);
  std::string hyp_text, ref_text;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    hyp_text += hyps[i] + "\n";
    ref_text += examples[i].transcript + "\n";
  }
  if (o.out.empty()) {
    std::cout << hyp_text;
  } else {
    WriteFile(o.out, hyp_text);
  }
  if (!o.refs_out.empty()) WriteFile(o.refs_out, ref_text);
  return 0;
}

// ------------------------------------------------------------- build-sft

struct BuildSftOptions {
  std::string manifest, out, modes, g2p, paraphrase;
};

std::map<std::string, std::string> ReadTable(const std::string& path) {
  if (path.empty()) return {};
  return nlohmann::json::parse(ReadFile(path)).get<std::map<std::string, std::string>>();
}

int BuildSft(const GlobalOptions& g, const BuildSftOptions& o) {
  const RunConfig run = g.Resolve();
  std::vector<slm::CotMode> modes;
  if (o.modes.empty()) {
    modes = slm::AllModes();
  } else {
    for (const auto& m : SplitString(o.modes, ',')) {
      try {
        modes.push_back(slm::ParseMode(Trim(m)));
      } catch (const ConfigError& e) {
        throw UsageError(e.what());
      }
    }
  }
  slm::AuxTools aux;
  aux.g2p = ReadTable(o.g2p);
  aux.paraphrase = ReadTable(o.paraphrase);
  const auto manifest = curate::ReadManifest(o.manifest);
  std::vector<slm::InstructionSource> sources;
  for (const auto& r : manifest.records) sources.push_back({r.id, r.transcript, r.translation, std::nullopt});
  nlohmann::json mode_names = nlohmann::json::array();
  for (auto m : modes) mode_names.push_back(slm::ModeName(m));
  const ResolvedConfig resolved =
      Resolve("build-sft", run,
              {{"manifest", o.manifest}, {"modes", mode_names}, {"g2p", o.g2p}, {"paraphrase", o.paraphrase}});
  LogResolved(resolved);
  const slm::InstructionDataset ds = slm::BuildInstructionDataset(sources, modes, aux, run.jobs);
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : ds.skipped) {
    skipped.push_back({{"id", s.id}, {"mode", slm::ModeName(s.mode)}, {"reason", s.reason}});
  }
  nlohmann::json header{{"__header__", true},
                        {"config", resolved.json},
                        {"config_hash", resolved.hash},
                        {"examples", ds.examples.size()},
                        {"skipped", skipped}};
  std::string text = header.dump() + "\n";
  for (const auto& e : ds.examples) text += nlohmann::json(e).dump() + "\n";
  WriteFile(o.out, text);
  LogInfo("build-sft: ", ds.examples.size(), " examples, ", ds.skipped.size(), " skipped");
  return 0;
}

std::vector<slm::InstructionExample> ReadSft(const std::string& path) {
  std::vector<slm::InstructionExample> out;
  for (const auto& line : ReadLines(path)) {
    if (Trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    if (j.value("__header__", false)) continue;
    out.push_back(j.get<slm::InstructionExample>());
  }
  return out;
}

// --------------------------------------------------------- train-aligner

struct TrainAlignerOptions {
  std::string encoder, lm, lm_out, sft, manifest, out;
  long steps = -1;
};

int TrainAlignerCmd(const GlobalOptions& g, const TrainAlignerOptions& o) {
  const RunConfig run = g.Resolve();
  const nn::Checkpoint enc_ckpt = nn::ReadCheckpoint(o.encoder);
  auto encoder = asr::LoadEncoderFromAny(enc_ckpt);
  const audio::SpectralConfig spectral = SpectralOf(enc_ckpt, run);
  const int rate = RateOf(enc_ckpt, run);

  const auto examples = ReadSft(o.sft);
  const auto manifest = curate::ReadManifest(o.manifest);
  std::map<std::string, const curate::SegmentRecord*> by_id;
  for (const auto& r : manifest.records) by_id[r.id] = &r;

  const nlohmann::json fsec = run.Section("fusion");
  slm::FusionConfig fcfg = fsec.get<slm::FusionConfig>();
  fcfg.seed = run.seed;
  if (o.steps >= 0) fcfg.steps = static_cast<std::size_t>(o.steps);
  const auto layers = fsec.value("layers", std::vector<std::size_t>{});
  const std::size_t hidden = fsec.value("aligner_hidden", std::size_t{0});

  Rng rng(run.seed);
  std::unique_ptr<slm::CausalLm> lm;
  slm::LmTrainConfig lcfg;
  const nlohmann::json lsec = run.Section("lm_train");
  lcfg.steps = lsec.value("steps", std::size_t{500});
  lcfg.batch_size = lsec.value("batch_size", lcfg.batch_size);
  lcfg.lr = lsec.value("lr", lcfg.lr);
  lcfg.seed = run.seed;
  if (!o.lm.empty()) {
    lm = slm::LoadLm(nn::ReadCheckpoint(o.lm));
    lcfg.steps = 0;
  } else {
    lm = std::make_unique<slm::CausalLm>(run.Section("lm").get<slm::LmConfig>(), rng);
  }
  const ResolvedConfig resolved =
      Resolve("train-aligner", run,
              {{"fusion", fcfg}, {"layers", layers}, {"aligner_hidden", hidden},
               {"lm", lm->config()}, {"lm_train_steps", lcfg.steps}, {"encoder", o.encoder},
               {"lm_init", o.lm}, {"sft", o.sft}, {"manifest", o.manifest}});
  LogResolved(resolved);

  if (lcfg.steps > 0) {
    // Text-only warm-up: the placeholder is replaced by the audio's text.
    std::vector<std::vector<int>> seqs;
    for (const auto& e : examples) {
      auto it = by_id.find(e.audio_id);
      const std::string content =
          it != by_id.end() && it->second->transcript ? *it->second->transcript : e.final_answer;
      std::vector<int> seq;
      for (int t : e.tokens) {
        if (t == slm::ByteTokenizer::kAudio) {
          for (int c : slm::ByteTokenizer::Encode(content)) seq.push_back(c);
        } else {
          seq.push_back(t);
        }
      }
      seqs.push_back(std::move(seq));
    }
    const auto losses = slm::TrainLm(*lm, seqs, lcfg);
    LogInfo("train-aligner: LM warm-up ", losses.size(), " steps, final loss ", losses.back());
  }
  if (!o.lm_out.empty()) nn::WriteCheckpoint(o.lm_out, slm::LmCheckpoint(*lm));

  slm::SpeechLlm model(std::move(encoder), std::move(lm), layers, hidden, rng);
  model.FreezeBackbones();
  AudioCache cache(rate);
  std::map<std::string, audio::FeatureMatrix> speech;
  std::vector<slm::FusionSample> samples;
  for (const auto& e : examples) {
    auto it = by_id.find(e.audio_id);
    if (it == by_id.end()) {
      LogWarn("train-aligner: audio ", e.audio_id, " not in manifest, example skipped");
      continue;
    }
    auto sp = speech.find(e.audio_id);
    if (sp == speech.end()) {
      const auto feats = ssl::ComputeInputFeatures(cache.Record(*it->second), spectral,
                                                   model.encoder().config().input_kind);
      sp = speech.emplace(e.audio_id, model.SpeechFeatures(feats)).first;
    }
    samples.push_back({e.id, e.mode, e.tokens, e.loss_mask, sp->second, e.final_answer});
  }
  const auto losses = slm::TrainAligner(model, samples, fcfg);
  nn::Checkpoint ckpt = slm::SlmCheckpoint(model);
  AddRunMetadata(ckpt, resolved, spectral, rate);
  ckpt.metadata["steps"] = std::to_string(losses.size());
  nn::WriteCheckpoint(o.out, ckpt);
  LogInfo("train-aligner: ", losses.size(), " steps, wrote ", o.out);
  return 0;
}

// ----------------------------------------------------------------- infer

struct InferOptions {
  std::string ckpt, wav, task = "transcribe", cot = "none";
  std::size_t max_tokens = 200;
};

slm::CotMode ModeFor(const std::string& task, const std::string& cot) {
  if (task == "transcribe") {
    if (cot == "none") return slm::CotMode::kTranscribe;
    if (cot == "phonemize") return slm::CotMode::kPhonemizeTranscribe;
    if (cot == "translate") return slm::CotMode::kTranslateTranscribe;
  } else if (task == "translate") {
    if (cot == "none") return slm::CotMode::kTranslate;
    if (cot == "transcribe") return slm::CotMode::kTranscribeTranslate;
    if (cot == "paraphrase" || cot == "reformulate") return slm::CotMode::kParaphraseTranslate;
  } else {
    throw UsageError("--task must be transcribe or translate");
  }
  throw UsageError("--cot " + cot + " is not available for --task " + task);
}

int Infer(const GlobalOptions& g, const InferOptions& o) {
  const RunConfig run = g.Resolve();
  const slm::CotMode mode = ModeFor(o.task, o.cot);
  const nn::Checkpoint ckpt = nn::ReadCheckpoint(o.ckpt);
  auto model = slm::LoadSpeechLlm(ckpt);
  const auto buf = audio::Resample(audio::ReadWav(o.wav), RateOf(ckpt, run));
  const auto feats = ssl::ComputeInputFeatures(buf, SpectralOf(ckpt, run), model->encoder().config().input_kind);
  const slm::GenerateResult gen = slm::Generate(*model, model->SpeechFeatures(feats), mode, o.max_tokens);
  const slm::CotOutput parsed = slm::ParseCotOutput(gen.text, mode);
  nlohmann::json steps = nlohmann::json::object();
  for (const auto& [name, text] : parsed.steps) steps[name] = text;
  nlohmann::json out{{"mode", slm::ModeName(mode)},
                     {"text", gen.text},
                     {"final", parsed.final_answer},
                     {"steps", steps},
                     {"malformed", parsed.malformed},
                     {"truncated", gen.truncated},
                     {"repetition_loop", slm::DetectRepetitionLoop(gen.text, 4, 4)}};
  std::cout << out.dump() << "\n";
  return 0;
}

// ------------------------------------------------------------------ eval

struct EvalOptions {
  std::string refs, hyps, metrics = "wer,cer,chrf", external, out, name = "system", lexicon;
  bool no_normalize = false;
};

int Eval(const GlobalOptions& g, const EvalOptions& o) {
  const RunConfig run = g.Resolve();
  std::vector<std::string> refs = ReadLines(o.refs), hyps = ReadLines(o.hyps);
  if (!o.no_normalize) {
    const auto rules = RulesFrom(run, o.lexicon);
    for (auto& r : refs) r = asr::NormalizeText(r, rules);
    for (auto& h : hyps) h = asr::NormalizeText(h, rules);
  }
  std::vector<std::string> metrics;
  for (const auto& m : SplitString(o.metrics, ',')) {
    const std::string k = Trim(m);
    if (k != "wer" && k != "cer" && k != "chrf") throw UsageError("unknown metric '" + k + "'");
    metrics.push_back(k);
  }
  eval::SystemScores s;
  s.name = o.name;
  s.utterances = refs.size();
  s.ref_words = eval::WordErrors(refs, refs).ref_tokens;
  for (const auto& m : metrics) {
    if (m == "wer") s.metrics[m] = eval::Wer(refs, hyps);
    if (m == "cer") s.metrics[m] = eval::Cer(refs, hyps);
    if (m == "chrf") s.metrics[m] = eval::Chrf(refs, hyps);
  }
  if (!o.external.empty()) {
    const auto ext = nlohmann::json::parse(ReadFile(o.external));
    for (const auto& [k, v] : ext.items()) {
      if (!v.is_number()) throw ConfigError("external score '" + k + "' is not a number");
      s.metrics[k] = v.get<double>();
      metrics.push_back(k);
    }
  }
  const ResolvedConfig resolved =
      Resolve("eval", run, {{"refs", o.refs}, {"hyps", o.hyps}, {"metrics", metrics},
                            {"normalize", !o.no_normalize}, {"external", o.external}});
  LogResolved(resolved);
  const eval::Report report = eval::BuildMetricReport("", {s}, metrics);
  std::cout << eval::RenderText(report);
  if (!o.out.empty()) {
    nlohmann::json j{{"report", nlohmann::json::parse(eval::RenderJson(report))},
                     {"scores", s.metrics},
                     {"config", resolved.json},
                     {"config_hash", resolved.hash}};
    WriteFile(o.out, j.dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------- report

struct ReportOptions {
  std::string input, format = "text", out;
};

int ReportCmd(const GlobalOptions& g, const ReportOptions& o) {
  g.Resolve();
  if (o.format != "text" && o.format != "json") throw UsageError("--format must be text or json");
  nlohmann::json j = nlohmann::json::parse(ReadFile(o.input));
  // An eval --out file carries its table under "report".
  if (j.contains("report") && j.at("report").is_object()) j = j.at("report");
  const eval::Report report = eval::ReportFromJson(j);
  const std::string text = o.format == "text" ? eval::RenderText(report) : eval::RenderJson(report);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    WriteFile(o.out, text);
  }
  return 0;
}

}  // namespace

int RunCli(int argc, char** argv) {
  CLI::App app{"slmforge: speech data curation, self-supervised pretraining, CTC ASR and speech-LLM fusion"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
  g.seed_opt = app.add_option("--seed", g.seed, "Random seed (overrides $SLMFORGE_SEED)");
  g.jobs_opt = app.add_option("--jobs", g.jobs, "Worker threads");
  g.rate_opt = app.add_option("--sample-rate", g.sample_rate, "Processing sample rate in Hz");
  app.add_flag("--deterministic", g.deterministic, "Force a single worker");
  app.add_flag("-v,--verbose", g.verbose, "Debug logging");
  app.add_flag("-q,--quiet", g.quiet, "Warnings and errors only");

  std::function<int()> action;

  CurateOptions curate_o;
  auto* curate = app.add_subcommand("curate", "Separate, segment, score and filter raw audio into a manifest");
  curate->add_option("--out", curate_o.out, "Output manifest (JSONL)")->required();
  curate->add_option("inputs", curate_o.inputs, "Input WAV files");
  curate->callback([&] { action = [&] { return Curate(g, curate_o); }; });

  PretrainOptions pre_o;
  auto* pre = app.add_subcommand("pretrain", "Masked-prediction pretraining of the speech encoder");
  pre->add_option("--manifest", pre_o.manifest, "Manifest (JSONL)")->required()->check(CLI::ExistingFile);
  pre->add_option("--init", pre_o.init, "Checkpoint to continue from")->check(CLI::ExistingFile);
  pre->add_option("--out", pre_o.out, "Output encoder checkpoint")->required();
  pre->add_option("--steps", pre_o.steps, "Stop after this many steps");
  pre->add_option("--codebook-out", pre_o.codebook_out, "Write the last codebook here");
  pre->callback([&] { action = [&] { return Pretrain(g, pre_o); }; });

  FinetuneOptions ft_o;
  auto* ft = app.add_subcommand("finetune-asr", "CTC fine-tuning of a pretrained encoder");
  ft->add_option("--init", ft_o.init, "Encoder checkpoint")->required()->check(CLI::ExistingFile);
  ft->add_option("--manifest", ft_o.manifest, "Manifest with transcripts")->required()->check(CLI::ExistingFile);
  ft->add_option("--out", ft_o.out, "Output ASR checkpoint")->required();
  ft->add_option("--vocab", ft_o.vocab, "Vocabulary file")->check(CLI::ExistingFile);
  ft->add_option("--vocab-out", ft_o.vocab_out, "Write the vocabulary here");
  ft->add_option("--lexicon", ft_o.lexicon, "Number lexicon JSON")->check(CLI::ExistingFile);
  ft->add_option("--steps", ft_o.steps, "Stop after this many steps");
  ft->callback([&] { action = [&] { return FinetuneAsr(g, ft_o); }; });

  TranscribeOptions tr_o;
  auto* tr = app.add_subcommand("transcribe", "Transcribe audio with an ASR checkpoint");
  tr->add_option("--ckpt", tr_o.ckpt, "ASR checkpoint")->required()->check(CLI::ExistingFile);
  tr->add_option("--wav", tr_o.wav, "Single WAV file")->check(CLI::ExistingFile);
  tr->add_option("--manifest", tr_o.manifest, "Manifest to transcribe")->check(CLI::ExistingFile);
  tr->add_option("--out", tr_o.out, "Hypotheses, one line per record");
  tr->add_option("--refs-out", tr_o.refs_out, "References, one line per record");
  tr->add_option("--beam", tr_o.beam, "Beam width (1 = greedy)")->check(CLI::PositiveNumber);
  tr->callback([&] { action = [&] { return TranscribeCmd(g, tr_o); }; });

  BuildSftOptions sft_o;
  auto* sft = app.add_subcommand("build-sft", "Build the chain-of-thought instruction dataset");
  sft->add_option("--manifest", sft_o.manifest, "Manifest")->required()->check(CLI::ExistingFile);
  sft->add_option("--out", sft_o.out, "Output JSONL")->required();
  sft->add_option("--modes", sft_o.modes, "Comma-separated modes (default all six)");
  sft->add_option("--g2p", sft_o.g2p, "Grapheme-to-phoneme rule table (JSON)")->check(CLI::ExistingFile);
  sft->add_option("--paraphrase", sft_o.paraphrase, "Paraphrase rule table (JSON)")->check(CLI::ExistingFile);
  sft->callback([&] { action = [&] { return BuildSft(g, sft_o); }; });

  TrainAlignerOptions ta_o;
  auto* ta = app.add_subcommand("train-aligner", "Train the speech aligner with encoder and LM frozen");
  ta->add_option("--encoder", ta_o.encoder, "Encoder or ASR checkpoint")->required()->check(CLI::ExistingFile);
  ta->add_option("--lm", ta_o.lm, "LM checkpoint (default: fresh LM warmed up on the text)")
      ->check(CLI::ExistingFile);
  ta->add_option("--lm-out", ta_o.lm_out, "Write the LM checkpoint here");
  ta->add_option("--sft", ta_o.sft, "Instruction dataset")->required()->check(CLI::ExistingFile);
  ta->add_option("--manifest", ta_o.manifest, "Manifest holding the audio")->required()->check(CLI::ExistingFile);
  ta->add_option("--out", ta_o.out, "Output speech-LLM checkpoint")->required();
  ta->add_option("--steps", ta_o.steps, "Aligner steps");
  ta->callback([&] { action = [&] { return TrainAlignerCmd(g, ta_o); }; });

  InferOptions in_o;
  auto* in = app.add_subcommand("infer", "Generate from a speech-LLM checkpoint");
  in->add_option("--ckpt", in_o.ckpt, "Speech-LLM checkpoint")->required()->check(CLI::ExistingFile);
  in->add_option("--wav", in_o.wav, "Input WAV")->required()->check(CLI::ExistingFile);
  in->add_option("--task", in_o.task, "transcribe or translate");
  in->add_option("--cot", in_o.cot, "none, phonemize, translate, transcribe or paraphrase");
  in->add_option("--max-tokens", in_o.max_tokens, "Generation limit");
  in->callback([&] { action = [&] { return Infer(g, in_o); }; });

  EvalOptions ev_o;
  auto* ev = app.add_subcommand("eval", "Score hypotheses against references");
  ev->add_option("--refs", ev_o.refs, "References, one per line")->required()->check(CLI::ExistingFile);
  ev->add_option("--hyps", ev_o.hyps, "Hypotheses, one per line")->required()->check(CLI::ExistingFile);
  ev->add_option("--metrics", ev_o.metrics, "Comma-separated: wer,cer,chrf");
  ev->add_option("--external-scores", ev_o.external, "JSON of extra scores")->check(CLI::ExistingFile);
  ev->add_option("--out", ev_o.out, "JSON report");
  ev->add_option("--name", ev_o.name, "System name");
  ev->add_option("--lexicon", ev_o.lexicon, "Number lexicon JSON")->check(CLI::ExistingFile);
  ev->add_flag("--no-normalize", ev_o.no_normalize, "Score the raw text");
  ev->callback([&] { action = [&] { return Eval(g, ev_o); }; });

  ReportOptions rp_o;
  auto* rp = app.add_subcommand("report", "Render a results table");
  rp->add_option("--input", rp_o.input, "Report rows (JSON)")->required()->check(CLI::ExistingFile);
  rp->add_option("--format", rp_o.format, "text or json");
  rp->add_option("--out", rp_o.out, "Output file");
  rp->callback([&] { action = [&] { return ReportCmd(g, rp_o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  SetLogLevel(g.verbose ? LogLevel::kDebug : g.quiet ? LogLevel::kWarn : LogLevel::kInfo);
  try {
    return action ? action() : 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace slmforge::cli
