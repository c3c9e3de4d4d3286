// tests/support/synth.hpp

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
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "slmforge/audio/audio.hpp"

namespace slmforge::testing {

audio::AudioBuffer Tone(double hz, double seconds, double amp = 0.5, int rate = 16000);
audio::AudioBuffer Silence(double seconds, int rate = 16000);
audio::AudioBuffer Noise(double seconds, double amp, std::uint64_t seed, int rate = 16000);
audio::AudioBuffer Concat(const std::vector<audio::AudioBuffer>& parts);
// Sample-wise sum; the result has the length of the longer input.
audio::AudioBuffer Mix(const audio::AudioBuffer& a, const audio::AudioBuffer& b);

// Harmonic bursts of 200 ms at f0 separated by 100 ms pauses, with a faint
// noise floor throughout.
audio::AudioBuffer SpeechLike(double seconds, double f0, std::uint64_t seed, int rate = 16000);

// A word spelled as one short tone per letter: a..h map to distinct
// frequencies, letters are separated by 50 ms of silence and the word is
// padded with 100 ms on each side.
audio::AudioBuffer ToneWord(const std::string& word, int rate = 16000);

// Self-deleting scratch directory.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string File(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace slmforge::testing
