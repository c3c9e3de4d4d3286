// src/slm/chat.cpp

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

#include "slmforge/slm/chat.hpp"

#include "slmforge/common/error.hpp"
#include "slmforge/common/text.hpp"
#include "slmforge/slm/tokenizer.hpp"

namespace slmforge::slm {

std::vector<CotMode> AllModes() {
  return {CotMode::kTranscribe, CotMode::kPhonemizeTranscribe, CotMode::kTranslateTranscribe,
          CotMode::kTranslate,  CotMode::kTranscribeTranslate, CotMode::kParaphraseTranslate};
}

std::string ModeName(CotMode mode) {
  switch (mode) {
    case CotMode::kTranscribe: return "transcribe";
    case CotMode::kPhonemizeTranscribe: return "phonemize_transcribe";
    case CotMode::kTranslateTranscribe: return "translate_transcribe";
    case CotMode::kTranslate: return "translate";
    case CotMode::kTranscribeTranslate: return "transcribe_translate";
    case CotMode::kParaphraseTranslate: return "paraphrase_translate";
  }
  return "?";
}

CotMode ParseMode(std::string_view name) {
  for (CotMode m : AllModes())
    if (ModeName(m) == name) return m;
  if (name == "reformulate_translate") return CotMode::kParaphraseTranslate;
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

std::vector<std::string> ModeSteps(CotMode mode) {
  switch (mode) {
    case CotMode::kTranscribe: return {};
    case CotMode::kPhonemizeTranscribe: return {"phonemize"};
    case CotMode::kTranslateTranscribe: return {"translate"};
    case CotMode::kTranslate: return {};
    case CotMode::kTranscribeTranslate: return {"transcribe"};
    case CotMode::kParaphraseTranslate: return {"paraphrase"};
  }
  return {};
}

std::string FinalTask(CotMode mode) {
  switch (mode) {
    case CotMode::kTranscribe:
    case CotMode::kPhonemizeTranscribe:
    case CotMode::kTranslateTranscribe: return "transcribe";
    default: return "translate";
  }
}

std::string ModeInstruction(CotMode mode) {
  switch (mode) {
    case CotMode::kTranscribe: return "Transcribe the audio.";
    case CotMode::kPhonemizeTranscribe: return "Phonemize the audio, then transcribe it.";
    case CotMode::kTranslateTranscribe: return "Translate the audio, then transcribe it.";
    case CotMode::kTranslate: return "Translate the audio.";
    case CotMode::kTranscribeTranslate: return "Transcribe the audio, then translate it.";
    case CotMode::kParaphraseTranslate: return "Paraphrase the audio, then translate it.";
  }
  return "";
}

std::string RenderUserTurn(CotMode mode) {
  std::string s(ByteTokenizer::kUserMarker);
  s += ByteTokenizer::kAudioMarker;
  s += "\n" + ModeInstruction(mode);
  s += ByteTokenizer::kEndMarker;
  s += "\n";
  return s;
}

std::string RenderPrompt(CotMode mode) {
  return RenderUserTurn(mode) + std::string(ByteTokenizer::kAssistantMarker);
}

std::string RenderCompletion(const Completion& completion) {
  std::string s;
  for (const auto& [name, text] : completion.steps) s += "STEP[" + name + "]: " + text + "\n";
  s += "FINAL: " + completion.final_answer;
  s += ByteTokenizer::kEndMarker;
  return s;
}

const std::string* CotOutput::Step(const std::string& name) const {
  for (const auto& [n, t] : steps)
    if (n == name) return &t;
  return nullptr;
}

CotOutput ParseCotOutput(std::string_view text, CotMode mode) {
  CotOutput out;
  std::string body(text);
  const std::string end(ByteTokenizer::kEndMarker);
  if (body.size() >= end.size() && body.compare(body.size() - end.size(), end.size(), end) == 0) {
    body.resize(body.size() - end.size());
  }
  bool have_final = false;
  std::string last_line;
  for (std::string line : SplitString(body, '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!Trim(line).empty()) last_line = Trim(line);
    if (line.rfind("FINAL:", 0) == 0) {
      out.final_answer = Trim(std::string_view(line).substr(6));
      have_final = true;
    } else if (line.rfind("STEP[", 0) == 0) {
      const auto close = line.find("]:");
      if (close == std::string::npos) continue;
      out.steps.emplace_back(line.substr(5, close - 5), Trim(std::string_view(line).substr(close + 2)));
    }
  }
  if (!have_final) {
    out.malformed = true;
    out.final_answer = last_line;
  }
  const auto expected = ModeSteps(mode);
  out.steps_match_mode = out.steps.size() == expected.size();
  for (std::size_t i = 0; out.steps_match_mode && i < expected.size(); ++i) {
    out.steps_match_mode = out.steps[i].first == expected[i];
  }
  return out;
}

bool DetectRepetitionLoop(std::string_view text, std::size_t n, std::size_t k) {
  if (n == 0 || k < 2) throw ConfigError("repetition check needs n >= 1 and k >= 2");
  const auto tokens = SplitWhitespace(text);
  for (std::size_t g = 1; g <= n; ++g) {
    if (g * k > tokens.size()) break;
    const std::size_t tail = tokens.size() - g;
    std::size_t repeats = 1;
    for (std::size_t start = tail; start >= g; start -= g) {
      bool same = true;
      for (std::size_t i = 0; i < g && same; ++i) same = tokens[start - g + i] == tokens[tail + i];
      if (!same) break;
      if (++repeats >= k) return true;
    }
  }
  return false;
}

}  // namespace slmforge::slm
