// include/slmforge/audio/wav.hpp

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

#include "slmforge/audio/audio.hpp"
#include "slmforge/common/error.hpp"

namespace slmforge::audio {

enum class WavErrorKind { kMissingFile, kMalformedHeader, kUnsupportedEncoding, kTruncatedData };

class WavError : public Error {
 public:
  WavError(WavErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  WavErrorKind kind() const { return kind_; }

 private:
  WavErrorKind kind_;
};

enum class WavEncoding { kPcm16, kFloat32 };

// RIFF/WAVE, little-endian PCM16 or IEEE float32 (plain or extensible
// format tags). Multichannel input is downmixed by averaging.
AudioBuffer ReadWav(const std::string& path);
AudioBuffer DecodeWav(std::string_view bytes);

std::string EncodeWav(const AudioBuffer& buf, WavEncoding encoding = WavEncoding::kPcm16);
void WriteWav(const std::string& path, const AudioBuffer& buf,
              WavEncoding encoding = WavEncoding::kPcm16);

}  // namespace slmforge::audio
