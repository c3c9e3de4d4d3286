// include/slmforge/slm/tokenizer.hpp

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
#include <vector>

namespace slmforge::slm {

// Bytes 0..255 plus four atomic special tokens.
class ByteTokenizer {
 public:
  static constexpr int kUser = 256;
  static constexpr int kAssistant = 257;
  static constexpr int kEnd = 258;
  static constexpr int kAudio = 259;
  static constexpr int kVocabSize = 260;

  static constexpr std::string_view kUserMarker = "<|user|>";
  static constexpr std::string_view kAssistantMarker = "<|assistant|>";
  static constexpr std::string_view kEndMarker = "<|end|>";
  static constexpr std::string_view kAudioMarker = "<|audio|>";

  // Marker strings become their special ids; everything else is bytes.
  static std::vector<int> Encode(std::string_view text);
  static std::string Decode(const std::vector<int>& ids);
  static std::string TokenString(int id);
};

}  // namespace slmforge::slm
