// include/slmforge/slm/chat.hpp

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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace slmforge::slm {

enum class CotMode {
  kTranscribe,
  kPhonemizeTranscribe,
  kTranslateTranscribe,
  kTranslate,
  kTranscribeTranslate,
  kParaphraseTranslate,
};

std::vector<CotMode> AllModes();
std::string ModeName(CotMode mode);
// Also accepts "reformulate_translate" for kParaphraseTranslate.
CotMode ParseMode(std::string_view name);

// Intermediate step names in emission order.
std::vector<std::string> ModeSteps(CotMode mode);
// "transcribe" or "translate".
std::string FinalTask(CotMode mode);
std::string ModeInstruction(CotMode mode);

struct Completion {
  std::vector<std::pair<std::string, std::string>> steps;
  std::string final_answer;
};

// <|user|><|audio|>\n{instruction}<|end|>\n
std::string RenderUserTurn(CotMode mode);
// Prompt that generation starts from: user turn plus the assistant marker.
std::string RenderPrompt(CotMode mode);
// STEP[name]: text lines followed by FINAL: text<|end|>.
std::string RenderCompletion(const Completion& completion);

struct CotOutput {
  std::vector<std::pair<std::string, std::string>> steps;
  std::string final_answer;
  bool malformed = false;
  // True when the step names are exactly those of the mode, in order.
  bool steps_match_mode = false;

  const std::string* Step(const std::string& name) const;
};

// Parses STEP/FINAL lines; a trailing <|end|> is ignored. The last FINAL
// wins. Without FINAL the last non-empty line is used and malformed is set.
CotOutput ParseCotOutput(std::string_view text, CotMode mode);

// True when the whitespace-token tail of `text` is some g-gram (1 <= g <= n)
// repeated at least k times in a row.
bool DetectRepetitionLoop(std::string_view text, std::size_t n, std::size_t k);

}  // namespace slmforge::slm
