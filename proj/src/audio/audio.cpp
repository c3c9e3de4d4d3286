// src/audio/audio.cpp

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

#include "slmforge/audio/audio.hpp"

#include <algorithm>
#include <cmath>

#include "slmforge/common/error.hpp"

namespace slmforge::audio {

void AudioBuffer::Validate() const {
  if (sample_rate <= 0) {
    throw ConfigError("sample rate must be positive, got " + std::to_string(sample_rate));
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw ConfigError("non-finite sample at index " + std::to_string(i));
    }
  }
}

AudioBuffer AudioBuffer::Slice(double start_s, double dur_s) const {
  const auto n = static_cast<long long>(samples.size());
  long long b = std::llround(start_s * sample_rate);
  long long e = std::llround((start_s + dur_s) * sample_rate);
  b = std::clamp(b, 0LL, n);
  e = std::clamp(e, b, n);
  AudioBuffer out;
  out.sample_rate = sample_rate;
  out.samples.assign(samples.begin() + b, samples.begin() + e);
  return out;
}

std::string FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kLogMel: return "logmel";
    case FeatureKind::kMfcc: return "mfcc";
    case FeatureKind::kHidden: return "hidden";
  }
  return "unknown";
}

FeatureKind ParseFeatureKind(const std::string& name) {
  if (name == "logmel") return FeatureKind::kLogMel;
  if (name == "mfcc") return FeatureKind::kMfcc;
  if (name == "hidden") return FeatureKind::kHidden;
  throw ConfigError("unknown feature kind '" + name + "'");
}

AudioBuffer Resample(const AudioBuffer& buf, int target_rate) {
  if (target_rate <= 0) {
    throw ConfigError("target rate must be positive, got " + std::to_string(target_rate));
  }
  if (target_rate == buf.sample_rate) return buf;
  AudioBuffer out;
  out.sample_rate = target_rate;
  const std::size_t n_in = buf.samples.size();
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_in) * target_rate / buf.sample_rate));
  out.samples.resize(n_out);
  if (n_in == 0) return out;
  const double step = static_cast<double>(buf.sample_rate) / target_rate;
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = static_cast<double>(i) * step;
    const auto i0 = static_cast<std::size_t>(pos);
    if (i0 + 1 >= n_in) {
      out.samples[i] = buf.samples[n_in - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(i0);
    out.samples[i] = buf.samples[i0] * (1.0 - frac) + buf.samples[i0 + 1] * frac;
  }
  return out;
}

std::vector<double> Downmix(std::span<const double> interleaved, int channels) {
  if (channels <= 1) return {interleaved.begin(), interleaved.end()};
  const std::size_t frames = interleaved.size() / channels;
  std::vector<double> out(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) acc += interleaved[f * channels + c];
    out[f] = acc / channels;
  }
  return out;
}

}  // namespace slmforge::audio
