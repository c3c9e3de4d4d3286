// include/slmforge/curate/vad.hpp

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
#include <vector>

#include "slmforge/audio/audio.hpp"
#include "slmforge/curate/types.hpp"

namespace slmforge::curate {

struct FrameEnergies {
  std::vector<double> db;  // 10 log10(mean square + 1e-12) per frame
  std::size_t frame = 0;   // samples
  std::size_t hop = 0;     // samples
  double hop_s = 0.0;
  double frame_s = 0.0;
};

FrameEnergies ComputeFrameEnergies(const audio::AudioBuffer& buf, const VadConfig& cfg);

// Frames above the 10th-percentile energy plus energy_threshold_db.
std::vector<std::uint8_t> SpeechFrames(const FrameEnergies& e, const VadConfig& cfg);

// Speech spans in seconds. A span runs from the centre of its first speech
// frame to the centre of its last; gaps shorter than hangover_ms are merged
// and spans shorter than min_speech_ms dropped.
std::vector<Span> VadSegments(const audio::AudioBuffer& buf, const VadConfig& cfg);

}  // namespace slmforge::curate
