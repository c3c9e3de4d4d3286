// include/slmforge/curate/quality.hpp

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

#include "slmforge/audio/audio.hpp"
#include "slmforge/curate/types.hpp"

namespace slmforge::curate {

// Speech-to-silence energy ratio in dB over VAD frames; 0 when either class
// is empty.
double EstimateSnrDb(const audio::AudioBuffer& buf, const VadConfig& cfg);

// 1 + 4 / (1 + exp(-(snr_db - 15) / 5)), clamped to [1, 5].
double SnrToScore(double snr_db);

double SnrProxyScore(const audio::AudioBuffer& buf, const VadConfig& cfg);

// WAV on stdin, one decimal score on stdout; clamped to [1, 5].
double ExternalScore(const audio::AudioBuffer& buf, const std::string& command);

double QualityScore(const audio::AudioBuffer& buf, const PipelineConfig& cfg);

enum class RejectReason { kTooShort, kTooLong, kLowQuality };
std::string RejectReasonName(RejectReason r);

struct FilterResult {
  std::vector<SegmentRecord> kept;
  std::vector<std::pair<SegmentRecord, RejectReason>> rejected;
};

// Keeps min_dur_s <= duration <= max_dur_s and quality > quality_threshold.
// Duration is checked first.
FilterResult FilterSegments(const std::vector<SegmentRecord>& records, const PipelineConfig& cfg);

}  // namespace slmforge::curate
