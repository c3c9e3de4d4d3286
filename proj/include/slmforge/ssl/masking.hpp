// include/slmforge/ssl/masking.hpp

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
#include <cstdint>
#include <vector>

#include "slmforge/common/rng.hpp"

namespace slmforge::ssl {

struct MaskSpec {
  double prob = 0.065;   // per-frame probability of starting a span
  std::size_t span = 10;  // frames per span
  std::uint64_t seed = 0;

  void Validate() const;
};

// Each frame independently starts a span with probability prob; a span
// starting at t masks [t, t + span) clipped to the sequence. Overlaps union.
std::vector<std::uint8_t> SpanMask(std::size_t frames, const MaskSpec& spec, Rng& rng);
std::vector<std::uint8_t> SpanMask(std::size_t frames, const MaskSpec& spec);

}  // namespace slmforge::ssl
