// include/slmforge/asr/normalize.hpp

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

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "slmforge/common/error.hpp"

namespace slmforge::asr {

class NormalizeError : public Error {
 public:
  using Error::Error;
};

struct NormalizationRules {
  bool lowercase = true;
  std::set<char32_t> punctuation;
  // Digit string -> words.
  std::map<std::string, std::string> lexicon;
  std::string language;
  // When false, digit runs are left as they are.
  bool spell_digits = true;
};

// ASCII punctuation plus common typographic quotes, dashes and ellipsis.
std::set<char32_t> DefaultPunctuation();

// Every non-whitespace codepoint in the file is a punctuation symbol.
std::set<char32_t> ParsePunctuation(std::string_view contents);

// Lexicon JSON is either a flat {"23": "twenty three", ...} object or
// {"language": "en", "numbers": {...}}. Values are normalized with the given
// case and punctuation rules on load.
void LoadLexicon(std::string_view json_text, NormalizationRules& rules);

// Default punctuation plus the lexicon at `lexicon_path` (empty path for
// none) and, when given, the punctuation file.
NormalizationRules LoadRules(const std::string& lexicon_path,
                             const std::string& punctuation_path = "");

char32_t ToLower(char32_t c);

// Lowercase, strip punctuation, spell out digit runs by longest lexicon key
// match from the left, collapse whitespace. Throws NormalizeError listing the
// digit run when some position in it matches no key.
std::string NormalizeText(std::string_view text, const NormalizationRules& rules);

}  // namespace slmforge::asr
