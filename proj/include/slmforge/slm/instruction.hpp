// include/slmforge/slm/instruction.hpp

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

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slmforge/slm/chat.hpp"

namespace slmforge::slm {

struct InstructionSource {
  std::string id;  // manifest record id
  std::optional<std::string> transcript;
  std::optional<std::string> translation;
  std::optional<std::string> paraphrase;
};

// Longest-match substitution over the input; unmatched characters pass
// through, so an empty table is the identity.
std::string ApplyRuleTable(const std::string& text, const std::map<std::string, std::string>& table);

struct AuxTools {
  std::map<std::string, std::string> g2p;          // grapheme -> phoneme rules
  std::map<std::string, std::string> paraphrase;   // rule table, used without a paraphrase field
  std::function<std::string(const std::string&)> paraphrase_hook;

  std::string Phonemize(const std::string& transcript) const;
  std::string Paraphrase(const InstructionSource& src) const;
};

struct InstructionExample {
  std::string id;
  std::string audio_id;
  CotMode mode = CotMode::kTranscribe;
  std::string prompt;      // user turn plus assistant marker
  std::string completion;  // assistant text through <|end|>
  std::string final_answer;
  std::vector<int> tokens;
  std::vector<std::uint8_t> loss_mask;  // 1 on completion tokens only

  std::string text() const { return prompt + completion; }
};

void to_json(nlohmann::json& j, const InstructionExample& e);
void from_json(const nlohmann::json& j, InstructionExample& e);

struct SkippedExample {
  std::string id;
  CotMode mode;
  std::string reason;
};

struct InstructionDataset {
  std::vector<InstructionExample> examples;
  std::vector<SkippedExample> skipped;
};

InstructionExample RenderExample(const std::string& audio_id, CotMode mode,
                                 const Completion& completion);

// Record-major, modes in the given order. Missing fields skip the pair
// with a logged reason.
InstructionDataset BuildInstructionDataset(const std::vector<InstructionSource>& sources,
                                           const std::vector<CotMode>& modes, const AuxTools& aux,
                                           int jobs = 1);

}  // namespace slmforge::slm
