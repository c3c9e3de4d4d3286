// include/slmforge/asr/ctc.hpp

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
#include <vector>

#include "slmforge/common/error.hpp"
#include "slmforge/nn/tensor.hpp"

namespace slmforge::asr {

class CtcError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kBlank = 0;

// Minimum frame count for a target: its length plus one blank between each
// pair of equal adjacent labels.
std::size_t CtcMinFrames(std::span<const int> target);

// log P(target | log_probs) by the forward algorithm. log_probs is
// row-major T x V. Throws CtcError when T < CtcMinFrames(target) or the
// target holds a blank or an out-of-range id.
double CtcLogLikelihood(std::span<const double> log_probs, std::size_t frames, std::size_t vocab,
                        std::span<const int> target);

// -log P(target | log_probs) as a graph node; log_probs is T x V.
nn::Tensor CtcLoss(const nn::Tensor& log_probs, std::span<const int> target);

// Frame argmax (lowest id on ties), adjacent repeats collapsed, blanks
// dropped.
std::vector<int> CtcGreedyDecode(std::span<const double> log_probs, std::size_t frames,
                                 std::size_t vocab);
std::vector<int> CtcGreedyDecode(const nn::Tensor& log_probs);

// Prefix beam search on collapsed labelings. Equal scores are broken in
// favour of the lexicographically smaller prefix. beam_width 1 returns the
// greedy result.
std::vector<int> CtcBeamDecode(std::span<const double> log_probs, std::size_t frames,
                               std::size_t vocab, std::size_t beam_width);
std::vector<int> CtcBeamDecode(const nn::Tensor& log_probs, std::size_t beam_width);

// Removes blanks and merges adjacent repeats of a frame-level path.
std::vector<int> CollapsePath(std::span<const int> path);

}  // namespace slmforge::asr
