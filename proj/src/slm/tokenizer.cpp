// src/slm/tokenizer.cpp

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

#include "slmforge/slm/tokenizer.hpp"

#include <array>
#include <utility>

#include "slmforge/common/error.hpp"

namespace slmforge::slm {
namespace {

constexpr std::array<std::pair<std::string_view, int>, 4> kSpecials = {{
    {ByteTokenizer::kUserMarker, ByteTokenizer::kUser},
    {ByteTokenizer::kAssistantMarker, ByteTokenizer::kAssistant},
    {ByteTokenizer::kEndMarker, ByteTokenizer::kEnd},
    {ByteTokenizer::kAudioMarker, ByteTokenizer::kAudio},
}};

}  // namespace

std::vector<int> ByteTokenizer::Encode(std::string_view text) {
  std::vector<int> ids;
  std::size_t i = 0;
  while (i < text.size()) {
    bool special = false;
    for (const auto& [marker, id] : kSpecials) {
      if (text.compare(i, marker.size(), marker) == 0) {
        ids.push_back(id);
        i += marker.size();
        special = true;
        break;
      }
    }
    if (!special) ids.push_back(static_cast<unsigned char>(text[i++]));
  }
  return ids;
}

std::string ByteTokenizer::TokenString(int id) {
  if (id >= 0 && id < 256) return std::string(1, static_cast<char>(id));
  for (const auto& [marker, special] : kSpecials)
    if (special == id) return std::string(marker);
  throw Error("token id " + std::to_string(id) + " out of range");
}

std::string ByteTokenizer::Decode(const std::vector<int>& ids) {
  std::string out;
  for (int id : ids) out += TokenString(id);
  return out;
}

}  // namespace slmforge::slm
