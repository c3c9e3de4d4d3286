// src/asr/vocab.cpp

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

#include "slmforge/asr/vocab.hpp"

#include <set>

#include "slmforge/common/text.hpp"

namespace slmforge::asr {

Vocab::Vocab() {
  symbols_.push_back(kBlankSymbol);
  index_[kBlankSymbol] = 0;
}

Vocab::Vocab(const std::vector<std::string>& symbols) : Vocab() {
  for (const auto& s : symbols) Add(s);
}

void Vocab::Add(const std::string& symbol) {
  if (symbol == kBlankSymbol) throw VocabError("blank symbol is reserved for id 0");
  if (DecodeUtf8(symbol).size() != 1) {
    throw VocabError("vocab symbol '" + symbol + "' is not a single character");
  }
  if (!index_.emplace(symbol, static_cast<int>(symbols_.size())).second) {
    throw VocabError("duplicate vocab symbol '" + symbol + "'");
  }
  symbols_.push_back(symbol);
}

Vocab Vocab::FromTexts(const std::vector<std::string>& texts) {
  std::set<char32_t> cps;
  for (const auto& t : texts)
    for (char32_t c : DecodeUtf8(t)) cps.insert(c);
  std::vector<std::string> symbols;
  for (char32_t c : cps) symbols.push_back(EncodeUtf8(c));
  return Vocab(symbols);
}

Vocab Vocab::Parse(std::string_view contents) {
  std::vector<std::string> lines = SplitString(contents, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != kBlankSymbol) {
    throw VocabError("vocab file must start with " + std::string(kBlankSymbol));
  }
  std::vector<std::string> symbols;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::string s = lines[i];
    if (!s.empty() && s.back() == '\r') s.pop_back();
    symbols.push_back(s == kSpaceSymbol ? " " : s);
  }
  return Vocab(symbols);
}

Vocab Vocab::Load(const std::string& path) { return Parse(ReadFile(path)); }

std::string Vocab::Serialize() const {
  std::string out;
  for (const auto& s : symbols_) {
    out += s == " " ? kSpaceSymbol : s;
    out += '\n';
  }
  return out;
}

void Vocab::Save(const std::string& path) const { WriteFile(path, Serialize()); }

const std::string& Vocab::symbol(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= symbols_.size()) {
    throw VocabError("vocab id " + std::to_string(id) + " out of range");
  }
  return symbols_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocab::Encode(std::string_view text) const {
  std::vector<int> ids;
  for (char32_t c : DecodeUtf8(text)) {
    const std::string s = EncodeUtf8(c);
    auto it = index_.find(s);
    if (it == index_.end()) throw VocabError("symbol '" + s + "' is not in the vocabulary");
    ids.push_back(it->second);
  }
  return ids;
}

std::string Vocab::Decode(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids)
    if (id != 0) out += symbol(id);
  return out;
}

}  // namespace slmforge::asr
