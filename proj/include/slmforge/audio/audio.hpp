// include/slmforge/audio/audio.hpp

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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace slmforge::audio {

inline constexpr int kDefaultSampleRate = 16000;

// Mono samples in [-1, 1] at a positive integer rate.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }

  // Throws ConfigError if the rate is not positive or a sample is non-finite.
  void Validate() const;

  // Samples in [start_s, start_s + duration_s), clipped to the buffer.
  AudioBuffer Slice(double start_s, double duration_s) const;
};

enum class FeatureKind { kLogMel, kMfcc, kHidden };

std::string FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(const std::string& name);

// Row-major T x D matrix of per-frame features.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  double frame_hop_s = 0.01;
  FeatureKind kind = FeatureKind::kLogMel;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t t, std::size_t d, double hop, FeatureKind k)
      : rows(t), cols(d), data(t * d, 0.0), frame_hop_s(hop), kind(k) {}

  double& at(std::size_t t, std::size_t d) { return data[t * cols + d]; }
  double at(std::size_t t, std::size_t d) const { return data[t * cols + d]; }
  std::span<double> row(std::size_t t) { return {data.data() + t * cols, cols}; }
  std::span<const double> row(std::size_t t) const {
    return {data.data() + t * cols, cols};
  }
};

// Linear-interpolation resampler. Output length is
// round(len * target_rate / sample_rate); equal rates return an exact copy.
// Lossy: no anti-aliasing filter is applied when downsampling.
AudioBuffer Resample(const AudioBuffer& buf, int target_rate);

// Averages interleaved channels into one.
std::vector<double> Downmix(std::span<const double> interleaved, int channels);

}  // namespace slmforge::audio
