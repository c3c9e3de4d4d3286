// src/slm/instruction.cpp

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

#include "slmforge/slm/instruction.hpp"

#include <algorithm>

#include "slmforge/common/error.hpp"
#include "slmforge/common/log.hpp"
#include "slmforge/common/parallel.hpp"
#include "slmforge/common/text.hpp"
#include "slmforge/slm/tokenizer.hpp"

namespace slmforge::slm {

std::string ApplyRuleTable(const std::string& text, const std::map<std::string, std::string>& table) {
  if (table.empty()) return text;
  std::size_t longest = 0;
  for (const auto& [k, v] : table) longest = std::max(longest, k.size());
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    bool hit = false;
    for (std::size_t len = std::min(longest, text.size() - i); len > 0; --len) {
      auto it = table.find(text.substr(i, len));
      if (it != table.end()) {
        out += it->second;
        i += len;
        hit = true;
        break;
      }
    }
    if (!hit) {
      // Copy one whole UTF-8 sequence.
      std::size_t step = 1;
      while (i + step < text.size() && (static_cast<unsigned char>(text[i + step]) & 0xC0) == 0x80) ++step;
      out += text.substr(i, step);
      i += step;
    }
  }
  return out;
}

std::string AuxTools::Phonemize(const std::string& transcript) const {
  return ApplyRuleTable(transcript, g2p);
}

std::string AuxTools::Paraphrase(const InstructionSource& src) const {
  if (src.paraphrase) return *src.paraphrase;
  const std::string base = src.transcript.value_or(src.translation.value_or(""));
  if (paraphrase_hook) return paraphrase_hook(base);
  return ApplyRuleTable(base, paraphrase);
}

void to_json(nlohmann::json& j, const InstructionExample& e) {
  j = nlohmann::json{{"id", e.id},
                     {"audio_id", e.audio_id},
                     {"mode", ModeName(e.mode)},
                     {"prompt", e.prompt},
                     {"completion", e.completion},
                     {"final", e.final_answer}};
}

void from_json(const nlohmann::json& j, InstructionExample& e) {
  e = RenderExample(j.at("audio_id").get<std::string>(), ParseMode(j.at("mode").get<std::string>()),
                    Completion{});
  e.id = j.value("id", e.id);
  e.prompt = j.at("prompt").get<std::string>();
  e.completion = j.at("completion").get<std::string>();
  e.final_answer = j.value("final", "");
  const auto p = ByteTokenizer::Encode(e.prompt);
  const auto c = ByteTokenizer::Encode(e.completion);
  e.tokens = p;
  e.tokens.insert(e.tokens.end(), c.begin(), c.end());
  e.loss_mask.assign(p.size(), 0);
  e.loss_mask.resize(e.tokens.size(), 1);
}

InstructionExample RenderExample(const std::string& audio_id, CotMode mode,
                                 const Completion& completion) {
  InstructionExample e;
  e.id = audio_id + "/" + ModeName(mode);
  e.audio_id = audio_id;
  e.mode = mode;
  e.prompt = RenderPrompt(mode);
  e.completion = RenderCompletion(completion);
  e.final_answer = completion.final_answer;
  const auto p = ByteTokenizer::Encode(e.prompt);
  const auto c = ByteTokenizer::Encode(e.completion);
  e.tokens = p;
  e.tokens.insert(e.tokens.end(), c.begin(), c.end());
  e.loss_mask.assign(p.size(), 0);
  e.loss_mask.resize(e.tokens.size(), 1);
  return e;
}

namespace {

struct Built {
  std::optional<InstructionExample> example;
  std::string reason;
};

std::optional<std::string> Clean(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  std::string c = CollapseWhitespace(*s);
  if (c.empty()) return std::nullopt;
  return c;
}

Built BuildOne(const InstructionSource& src, CotMode mode, const AuxTools& aux) {
  const auto transcript = Clean(src.transcript);
  const auto translation = Clean(src.translation);
  const bool needs_translation = mode == CotMode::kTranslateTranscribe ||
                                 FinalTask(mode) == "translate";
  const bool needs_transcript = mode != CotMode::kTranslate && mode != CotMode::kParaphraseTranslate;
  if (needs_transcript && !transcript) return {std::nullopt, "missing transcript"};
  if (needs_translation && !translation) return {std::nullopt, "missing translation"};
  Completion c;
  switch (mode) {
    case CotMode::kTranscribe:
      c.final_answer = *transcript;
      break;
    case CotMode::kPhonemizeTranscribe:
      c.steps.emplace_back("phonemize", CollapseWhitespace(aux.Phonemize(*transcript)));
      c.final_answer = *transcript;
      break;
    case CotMode::kTranslateTranscribe:
      c.steps.emplace_back("translate", *translation);
      c.final_answer = *transcript;
      break;
    case CotMode::kTranslate:
      c.final_answer = *translation;
      break;
    case CotMode::kTranscribeTranslate:
      c.steps.emplace_back("transcribe", *transcript);
      c.final_answer = *translation;
      break;
    case CotMode::kParaphraseTranslate: {
      InstructionSource cleaned = src;
      cleaned.transcript = transcript;
      cleaned.translation = translation;
      const std::string para = CollapseWhitespace(aux.Paraphrase(cleaned));
      if (para.empty()) return {std::nullopt, "empty paraphrase"};
      c.steps.emplace_back("paraphrase", para);
      c.final_answer = *translation;
      break;
    }
  }
  return {RenderExample(src.id, mode, c), ""};
}

}  // namespace

InstructionDataset BuildInstructionDataset(const std::vector<InstructionSource>& sources,
                                           const std::vector<CotMode>& modes, const AuxTools& aux,
                                           int jobs) {
  std::vector<Built> built(sources.size() * modes.size());
  ParallelFor(sources.size(), jobs, [&](std::size_t i) {
    for (std::size_t m = 0; m < modes.size(); ++m) built[i * modes.size() + m] = BuildOne(sources[i], modes[m], aux);
  });
  InstructionDataset ds;
  for (std::size_t i = 0; i < built.size(); ++i) {
    const auto& src = sources[i / modes.size()];
    const CotMode mode = modes[i % modes.size()];
    if (built[i].example) {
      ds.examples.push_back(std::move(*built[i].example));
    } else {
      LogInfo("build-sft: skipping ", src.id, " for ", ModeName(mode), ": ", built[i].reason);
      ds.skipped.push_back({src.id, mode, built[i].reason});
    }
  }
  return ds;
}

}  // namespace slmforge::slm
