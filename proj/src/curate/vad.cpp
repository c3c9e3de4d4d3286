// src/curate/vad.cpp

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

#include "slmforge/curate/vad.hpp"

#include <algorithm>
#include <cmath>

#include "slmforge/audio/spectral.hpp"

namespace slmforge::curate {

FrameEnergies ComputeFrameEnergies(const audio::AudioBuffer& buf, const VadConfig& cfg) {
  cfg.Validate();
  FrameEnergies e;
  e.frame = static_cast<std::size_t>(std::lround(cfg.frame_ms * 1e-3 * buf.sample_rate));
  e.hop = static_cast<std::size_t>(std::lround(cfg.hop_ms * 1e-3 * buf.sample_rate));
  e.frame = std::max<std::size_t>(e.frame, 1);
  e.hop = std::max<std::size_t>(e.hop, 1);
  e.hop_s = static_cast<double>(e.hop) / buf.sample_rate;
  e.frame_s = static_cast<double>(e.frame) / buf.sample_rate;
  const std::size_t n = audio::NumFrames(buf.size(), e.frame, e.hop);
  e.db.resize(n);
  for (std::size_t f = 0; f < n; ++f) {
    double acc = 0.0;
    const std::size_t start = f * e.hop;
    const std::size_t end = std::min(buf.size(), start + e.frame);
    for (std::size_t i = start; i < end; ++i) acc += buf.samples[i] * buf.samples[i];
    e.db[f] = 10.0 * std::log10(acc / static_cast<double>(e.frame) + 1e-12);
  }
  return e;
}

std::vector<std::uint8_t> SpeechFrames(const FrameEnergies& e, const VadConfig& cfg) {
  std::vector<std::uint8_t> speech(e.db.size(), 0);
  if (e.db.empty()) return speech;
  std::vector<double> sorted = e.db;
  const std::size_t idx = static_cast<std::size_t>(0.10 * static_cast<double>(sorted.size() - 1));
  std::nth_element(sorted.begin(), sorted.begin() + idx, sorted.end());
  const double threshold = sorted[idx] + cfg.energy_threshold_db;
  for (std::size_t f = 0; f < e.db.size(); ++f) speech[f] = e.db[f] > threshold ? 1 : 0;
  return speech;
}

std::vector<Span> VadSegments(const audio::AudioBuffer& buf, const VadConfig& cfg) {
  const FrameEnergies e = ComputeFrameEnergies(buf, cfg);
  const auto speech = SpeechFrames(e, cfg);
  struct Run {
    std::size_t first, last;
  };
  std::vector<Run> runs;
  for (std::size_t f = 0; f < speech.size(); ++f) {
    if (!speech[f]) continue;
    if (!runs.empty() && runs.back().last + 1 == f) {
      runs.back().last = f;
    } else {
      runs.push_back({f, f});
    }
  }
  std::vector<Run> merged;
  for (const auto& r : runs) {
    if (!merged.empty()) {
      const double gap_ms = static_cast<double>(r.first - merged.back().last - 1) * e.hop_s * 1e3;
      if (gap_ms < cfg.hangover_ms) {
        merged.back().last = r.last;
        continue;
      }
    }
    merged.push_back(r);
  }
  std::vector<Span> spans;
  const double half = e.frame_s / 2.0;
  for (const auto& r : merged) {
    Span s;
    s.start_s = static_cast<double>(r.first) * e.hop_s + half;
    s.end_s = static_cast<double>(r.last) * e.hop_s + half;
    if (s.end_s - s.start_s < cfg.min_speech_ms * 1e-3 || !(s.end_s > s.start_s)) continue;
    spans.push_back(s);
  }
  return spans;
}

}  // namespace slmforge::curate
