// src/eval/metrics.cpp

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

#include "slmforge/eval/metrics.hpp"

#include <map>

#include "slmforge/common/text.hpp"

namespace slmforge::eval {
namespace {

void CheckPaired(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
  if (refs.size() != hyps.size()) {
    throw MetricError("refs and hyps differ in length: " + std::to_string(refs.size()) + " vs " +
                      std::to_string(hyps.size()));
  }
}

double Rate(const ErrorCounts& c, const char* what) {
  if (c.ref_tokens == 0) throw MetricError(std::string("references contain no ") + what);
  return static_cast<double>(c.edits) / static_cast<double>(c.ref_tokens);
}

std::u32string StripSpace(std::string_view text) {
  std::u32string out;
  for (char32_t c : DecodeUtf8(text))
    if (c != U' ' && c != U'\t' && c != U'\n' && c != U'\r' && c != U'\f' && c != U'\v') out += c;
  return out;
}

}  // namespace

std::vector<std::string> WordTokens(std::string_view text) { return SplitWhitespace(text); }

std::vector<char32_t> CharTokens(std::string_view text) {
  return DecodeUtf8(CollapseWhitespace(text));
}

ErrorCounts WordErrors(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
  CheckPaired(refs, hyps);
  ErrorCounts c;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto r = WordTokens(refs[i]);
    c.edits += EditDistance(r, WordTokens(hyps[i]));
    c.ref_tokens += r.size();
  }
  return c;
}

ErrorCounts CharErrors(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
  CheckPaired(refs, hyps);
  ErrorCounts c;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto r = CharTokens(refs[i]);
    c.edits += EditDistance(r, CharTokens(hyps[i]));
    c.ref_tokens += r.size();
  }
  return c;
}

double Wer(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
  return Rate(WordErrors(refs, hyps), "words");
}

double Cer(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
  return Rate(CharErrors(refs, hyps), "characters");
}

double Chrf(const std::vector<std::string>& refs, const std::vector<std::string>& hyps, int max_n,
            double beta) {
  CheckPaired(refs, hyps);
  if (max_n < 1) throw MetricError("chrF max_n must be at least 1");
  const std::size_t orders = static_cast<std::size_t>(max_n);
  std::vector<double> match(orders, 0.0), hyp_total(orders, 0.0), ref_total(orders, 0.0);
  bool all_equal = true;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const std::u32string r = StripSpace(refs[i]);
    const std::u32string h = StripSpace(hyps[i]);
    all_equal = all_equal && r == h;
    for (std::size_t n = 1; n <= orders; ++n) {
      std::map<std::u32string, int> rc, hc;
      for (std::size_t s = 0; s + n <= r.size(); ++s) ++rc[r.substr(s, n)];
      for (std::size_t s = 0; s + n <= h.size(); ++s) ++hc[h.substr(s, n)];
      for (const auto& [gram, count] : hc) {
        auto it = rc.find(gram);
        if (it != rc.end()) match[n - 1] += std::min(count, it->second);
      }
      hyp_total[n - 1] += h.size() >= n ? static_cast<double>(h.size() - n + 1) : 0.0;
      ref_total[n - 1] += r.size() >= n ? static_cast<double>(r.size() - n + 1) : 0.0;
    }
  }
  double p = 0.0, rec = 0.0;
  int effective = 0;
  for (std::size_t n = 0; n < orders; ++n) {
    if (hyp_total[n] == 0.0 || ref_total[n] == 0.0) continue;
    p += match[n] / hyp_total[n];
    rec += match[n] / ref_total[n];
    ++effective;
  }
  if (effective == 0) return all_equal ? 100.0 : 0.0;
  p /= effective;
  rec /= effective;
  if (p + rec == 0.0) return 0.0;
  const double b2 = beta * beta;
  return 100.0 * (1.0 + b2) * p * rec / (b2 * p + rec);
}

}  // namespace slmforge::eval
