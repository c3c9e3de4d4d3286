// include/slmforge/eval/metrics.hpp

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

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "slmforge/common/error.hpp"

namespace slmforge::eval {

class MetricError : public Error {
 public:
  using Error::Error;
};

// Levenshtein distance with unit costs.
template <typename T>
std::size_t EditDistance(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min(sub, std::min(prev[j], cur[j - 1]) + 1);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

struct ErrorCounts {
  std::size_t edits = 0;
  std::size_t ref_tokens = 0;
};

std::vector<std::string> WordTokens(std::string_view text);
// Codepoints after collapsing whitespace runs and trimming.
std::vector<char32_t> CharTokens(std::string_view text);

ErrorCounts WordErrors(const std::vector<std::string>& refs, const std::vector<std::string>& hyps);
ErrorCounts CharErrors(const std::vector<std::string>& refs, const std::vector<std::string>& hyps);

// Corpus-level rates as fractions. Throw MetricError on length mismatch or
// when the references hold no tokens.
double Wer(const std::vector<std::string>& refs, const std::vector<std::string>& hyps);
double Cer(const std::vector<std::string>& refs, const std::vector<std::string>& hyps);

// Character n-gram F-score on 0..100 with whitespace removed. Counts are
// summed over the corpus per order; precision and recall are averaged over
// the orders where both sides have n-grams. With no such order the score is
// 100 when every pair is identical and 0 otherwise.
double Chrf(const std::vector<std::string>& refs, const std::vector<std::string>& hyps,
            int max_n = 6, double beta = 2.0);

}  // namespace slmforge::eval
