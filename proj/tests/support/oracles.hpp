// tests/support/oracles.hpp

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
#include <functional>
#include <string>
#include <vector>

#include "slmforge/nn/tensor.hpp"

namespace slmforge::testing {

// Sum over every frame-level path of length T whose collapse equals
// `target`, by enumerating all V^T paths. lp is row-major T x V
// log-probabilities.
double BruteCtcProbability(const std::vector<double>& lp, std::size_t frames, std::size_t vocab,
                           const std::vector<int>& target);

// Most probable collapsed labeling, by enumerating all paths.
std::vector<int> BruteBestLabeling(const std::vector<double>& lp, std::size_t frames,
                                   std::size_t vocab);

// Plain recursion over (i, j) with a memo table.
std::size_t RecursiveEditDistance(const std::vector<std::string>& a,
                                  const std::vector<std::string>& b);
std::size_t RecursiveEditDistance(const std::u32string& a, const std::u32string& b);

// chrF from explicit n-gram lists with pairwise matching.
double BruteChrf(const std::vector<std::string>& refs, const std::vector<std::string>& hyps,
                 int max_n = 6, double beta = 2.0);

struct GradCheckOptions {
  double step = 3e-4;
  // Relative errors are taken against max(|analytic|, |numeric|, floor).
  double floor = 1e-6;
};

// Largest relative error between the analytic gradient of
// sum(w * f(inputs)) and central differences, over every element of every
// input that requires grad. w is a fixed pseudo-random weighting.
double MaxGradError(const std::function<nn::Tensor(const std::vector<nn::Tensor>&)>& f,
                    const std::vector<nn::Tensor>& inputs, GradCheckOptions opts = {});

// Leaf of uniform values in [lo, hi].
nn::Tensor RandomLeaf(const nn::Shape& shape, std::uint64_t seed, double lo = -2.0, double hi = 2.0,
                      bool requires_grad = true);

}  // namespace slmforge::testing
