// src/ssl/masking.cpp

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

#include "slmforge/ssl/masking.hpp"

#include <algorithm>

#include "slmforge/common/error.hpp"

namespace slmforge::ssl {

void MaskSpec::Validate() const {
  if (!(prob >= 0.0 && prob <= 1.0)) throw ConfigError("mask prob must be in [0, 1]");
  if (span < 1) throw ConfigError("mask span must be at least 1");
}

std::vector<std::uint8_t> SpanMask(std::size_t frames, const MaskSpec& spec, Rng& rng) {
  spec.Validate();
  std::vector<std::uint8_t> mask(frames, 0);
  for (std::size_t t = 0; t < frames; ++t) {
    // Uniform() < 1 always, so prob = 1 starts a span at every frame.
    if (rng.Uniform() < spec.prob) {
      const std::size_t end = std::min(frames, t + spec.span);
      std::fill(mask.begin() + t, mask.begin() + end, 1);
    }
  }
  return mask;
}

std::vector<std::uint8_t> SpanMask(std::size_t frames, const MaskSpec& spec) {
  Rng rng(spec.seed);
  return SpanMask(frames, spec, rng);
}

}  // namespace slmforge::ssl
