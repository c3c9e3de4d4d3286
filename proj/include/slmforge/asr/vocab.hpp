// include/slmforge/asr/vocab.hpp

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
#include <string>
#include <string_view>
#include <vector>

#include "slmforge/common/error.hpp"

namespace slmforge::asr {

class VocabError : public Error {
 public:
  using Error::Error;
};

inline constexpr const char* kBlankSymbol = "<blank>";
inline constexpr const char* kSpaceSymbol = "<space>";

// Character-level CTC vocabulary. Id 0 is the blank; every other symbol is a
// single UTF-8 codepoint.
class Vocab {
 public:
  Vocab();
  // Symbols exclude the blank; duplicates are rejected.
  explicit Vocab(const std::vector<std::string>& symbols);

  // Sorted set of codepoints appearing in `texts`.
  static Vocab FromTexts(const std::vector<std::string>& texts);

  // One symbol per line, line 0 is <blank>, a space is written <space>.
  static Vocab Parse(std::string_view contents);
  static Vocab Load(const std::string& path);
  std::string Serialize() const;
  void Save(const std::string& path) const;

  std::size_t size() const { return symbols_.size(); }
  const std::string& symbol(int id) const;
  bool Contains(const std::string& symbol) const { return index_.count(symbol) > 0; }

  // Throws VocabError naming the first unknown symbol.
  std::vector<int> Encode(std::string_view text) const;
  // Blank ids are skipped.
  std::string Decode(const std::vector<int>& ids) const;

  const std::vector<std::string>& symbols() const { return symbols_; }

 private:
  void Add(const std::string& symbol);

  std::vector<std::string> symbols_;
  std::map<std::string, int> index_;
};

}  // namespace slmforge::asr
