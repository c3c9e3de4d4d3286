// src/curate/quality.cpp

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

#include "slmforge/curate/quality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "slmforge/audio/wav.hpp"
#include "slmforge/common/subprocess.hpp"
#include "slmforge/common/text.hpp"
#include "slmforge/curate/separation.hpp"
#include "slmforge/curate/vad.hpp"

namespace slmforge::curate {

double EstimateSnrDb(const audio::AudioBuffer& buf, const VadConfig& cfg) {
  const FrameEnergies e = ComputeFrameEnergies(buf, cfg);
  const auto speech = SpeechFrames(e, cfg);
  double s = 0.0, n = 0.0;
  std::size_t ns = 0, nn = 0;
  for (std::size_t f = 0; f < speech.size(); ++f) {
    const double p = std::pow(10.0, e.db[f] / 10.0);
    if (speech[f]) {
      s += p;
      ++ns;
    } else {
      n += p;
      ++nn;
    }
  }
  if (ns == 0 || nn == 0) return 0.0;
  return 10.0 * std::log10((s / ns) / (n / nn));
}

double SnrToScore(double snr_db) {
  return std::clamp(1.0 + 4.0 / (1.0 + std::exp(-(snr_db - 15.0) / 5.0)), 1.0, 5.0);
}

double SnrProxyScore(const audio::AudioBuffer& buf, const VadConfig& cfg) {
  return SnrToScore(EstimateSnrDb(buf, cfg));
}

double ExternalScore(const audio::AudioBuffer& buf, const std::string& command) {
  ProcessResult r = RunProcess(command, audio::EncodeWav(buf, audio::WavEncoding::kFloat32));
  if (r.exit_code != 0) {
    throw StageError("quality", "command '" + command + "' exited with code " +
                                    std::to_string(r.exit_code),
                     r.exit_code, StderrExcerpt(r.stderr_data));
  }
  const std::string text = Trim(r.stdout_data);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw StageError("quality", "scorer output '" + text.substr(0, 80) + "' is not a decimal", 0,
                     StderrExcerpt(r.stderr_data));
  }
  return std::clamp(v, 1.0, 5.0);
}

double QualityScore(const audio::AudioBuffer& buf, const PipelineConfig& cfg) {
  if (cfg.scorer == "external") return ExternalScore(buf, cfg.scorer_command);
  return SnrProxyScore(buf, cfg.vad);
}

std::string RejectReasonName(RejectReason r) {
  switch (r) {
    case RejectReason::kTooShort: return "too_short";
    case RejectReason::kTooLong: return "too_long";
    default: return "low_quality";
  }
}

FilterResult FilterSegments(const std::vector<SegmentRecord>& records, const PipelineConfig& cfg) {
  FilterResult out;
  for (const auto& r : records) {
    if (r.duration_s < cfg.min_dur_s) {
      out.rejected.emplace_back(r, RejectReason::kTooShort);
    } else if (r.duration_s > cfg.max_dur_s) {
      out.rejected.emplace_back(r, RejectReason::kTooLong);
    } else if (!(r.quality_score > cfg.quality_threshold)) {
      out.rejected.emplace_back(r, RejectReason::kLowQuality);
    } else {
      out.kept.push_back(r);
    }
  }
  return out;
}

}  // namespace slmforge::curate
