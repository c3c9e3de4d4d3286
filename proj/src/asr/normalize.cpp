// src/asr/normalize.cpp

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

#include "slmforge/asr/normalize.hpp"

#include <algorithm>

#include <json.hpp>

#include "slmforge/common/text.hpp"

namespace slmforge::asr {
namespace {

bool IsDigit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool IsSpace(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
         c == 0xA0;
}

std::string SpellDigits(const std::string& run, const NormalizationRules& rules) {
  std::string out;
  std::size_t i = 0;
  while (i < run.size()) {
    std::size_t best = 0;
    const std::string* words = nullptr;
    for (std::size_t len = run.size() - i; len >= 1; --len) {
      auto it = rules.lexicon.find(run.substr(i, len));
      if (it != rules.lexicon.end()) {
        best = len;
        words = &it->second;
        break;
      }
    }
    if (!words) {
      throw NormalizeError("no lexicon entry covers digit run '" + run + "' at offset " +
                           std::to_string(i) +
                           (rules.language.empty() ? "" : " (language " + rules.language + ")"));
    }
    if (!out.empty()) out += ' ';
    out += *words;
    i += best;
  }
  return out;
}

std::string BasicNormalize(std::string_view text, const NormalizationRules& rules) {
  std::string out;
  for (char32_t c : DecodeUtf8(text)) {
    if (rules.punctuation.count(c)) continue;
    out += EncodeUtf8(rules.lowercase ? ToLower(c) : c);
  }
  return out;
}

}  // namespace

char32_t ToLower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c >= 0x100 && c <= 0x137) return c | 1;
  if (c >= 0x139 && c <= 0x148) return (c & 1) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return c | 1;
  if (c == 0x178) return 0xFF;
  if (c >= 0x179 && c <= 0x17E) return (c & 1) ? c + 1 : c;
  return c;
}

std::set<char32_t> DefaultPunctuation() {
  std::set<char32_t> p;
  for (char c : std::string_view("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")) p.insert(char32_t(c));
  for (char32_t c : {0x00A1, 0x00AB, 0x00BB, 0x00BF, 0x2013, 0x2014, 0x2018, 0x2019, 0x201C,
                     0x201D, 0x2026}) {
    p.insert(c);
  }
  return p;
}

std::set<char32_t> ParsePunctuation(std::string_view contents) {
  std::set<char32_t> p;
  for (char32_t c : DecodeUtf8(contents))
    if (!IsSpace(c)) p.insert(c);
  return p;
}

void LoadLexicon(std::string_view json_text, NormalizationRules& rules) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("lexicon is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("lexicon must be a JSON object");
  const nlohmann::json* table = &j;
  if (j.contains("numbers")) {
    rules.language = j.value("language", "");
    table = &j["numbers"];
    if (!table->is_object()) throw ConfigError("lexicon 'numbers' must be an object");
  }
  for (const auto& [key, value] : table->items()) {
    if (key.empty() || !std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw ConfigError("lexicon key '" + key + "' is not a digit string");
    }
    if (!value.is_string()) throw ConfigError("lexicon value for '" + key + "' is not a string");
    const std::string words = CollapseWhitespace(BasicNormalize(value.get<std::string>(), rules));
    if (words.empty()) throw ConfigError("lexicon value for '" + key + "' is empty");
    for (char32_t c : DecodeUtf8(words)) {
      if (IsDigit(c)) throw ConfigError("lexicon value for '" + key + "' contains digits");
    }
    rules.lexicon[key] = words;
  }
}

NormalizationRules LoadRules(const std::string& lexicon_path, const std::string& punctuation_path) {
  NormalizationRules rules;
  rules.punctuation =
      punctuation_path.empty() ? DefaultPunctuation() : ParsePunctuation(ReadFile(punctuation_path));
  if (!lexicon_path.empty()) LoadLexicon(ReadFile(lexicon_path), rules);
  return rules;
}

std::string NormalizeText(std::string_view text, const NormalizationRules& rules) {
  const std::string basic = BasicNormalize(text, rules);
  std::string out;
  std::string run;
  auto flush = [&] {
    if (run.empty()) return;
    if (rules.spell_digits) {
      out += ' ';
      out += SpellDigits(run, rules);
      out += ' ';
    } else {
      out += run;
    }
    run.clear();
  };
  for (char32_t c : DecodeUtf8(basic)) {
    if (IsDigit(c)) {
      run += static_cast<char>(c);
      continue;
    }
    flush();
    out += IsSpace(c) ? std::string(" ") : EncodeUtf8(c);
  }
  flush();
  return CollapseWhitespace(out);
}

}  // namespace slmforge::asr
