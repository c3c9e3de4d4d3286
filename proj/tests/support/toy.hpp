// tests/support/toy.hpp

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
#include <vector>

#include "slmforge/asr/finetune.hpp"
#include "slmforge/asr/vocab.hpp"
#include "slmforge/audio/spectral.hpp"
#include "slmforge/ssl/encoder.hpp"
#include "slmforge/ssl/pretrain.hpp"

namespace slmforge::testing {

// Small log-mel encoder used by the toy runs.
ssl::EncoderConfig ToyEncoderConfig();

// Distinct three-letter words over a..d.
std::vector<std::string> ToyWords(std::size_t n);

struct ToyAsr {
  asr::Vocab vocab;
  std::vector<asr::AsrExample> examples;
};
ToyAsr MakeToyAsr(const std::vector<std::string>& words, const audio::SpectralConfig& spectral = {});

// Tone words of random length and letters, as pretraining utterances.
std::vector<ssl::Utterance> ToySslCorpus(std::size_t n, std::uint64_t seed,
                                         const audio::SpectralConfig& spectral = {});

// Writes a small set of WAV files exercising every curation branch and
// returns their paths: speech with pauses, two alternating speakers, a clip
// too short to keep, a noisy clip and one long enough to be split.
std::vector<std::string> WriteCurationCorpus(const std::string& dir);

}  // namespace slmforge::testing
