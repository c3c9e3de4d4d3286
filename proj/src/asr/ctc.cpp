// src/asr/ctc.cpp

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

#include "slmforge/asr/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace slmforge::asr {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

struct Lattice {
  std::size_t frames, vocab, states;
  std::vector<int> ext;  // blank-interleaved target
  std::vector<double> alpha, beta;
  double log_p;
};

void CheckTarget(std::span<const int> target, std::size_t frames, std::size_t vocab) {
  for (int y : target) {
    if (y == kBlank) throw CtcError("CTC target contains the blank id");
    if (y < 0 || static_cast<std::size_t>(y) >= vocab) {
      throw CtcError("CTC target id " + std::to_string(y) + " outside vocab of " +
                     std::to_string(vocab));
    }
  }
  const std::size_t need = CtcMinFrames(target);
  if (frames < need) {
    throw CtcError("CTC input of " + std::to_string(frames) + " frames is too short for a target " +
                   "needing " + std::to_string(need));
  }
}

Lattice Forward(std::span<const double> lp, std::size_t frames, std::size_t vocab,
                std::span<const int> target, bool with_beta) {
  CheckTarget(target, frames, vocab);
  Lattice L{frames, vocab, 2 * target.size() + 1, {}, {}, {}, 0.0};
  L.ext.assign(L.states, kBlank);
  for (std::size_t i = 0; i < target.size(); ++i) L.ext[2 * i + 1] = target[i];
  const std::size_t S = L.states;
  auto at = [&](std::size_t t, std::size_t s) { return lp[t * vocab + L.ext[s]]; };
  auto can_skip = [&](std::size_t s) { return s >= 2 && L.ext[s] != kBlank && L.ext[s] != L.ext[s - 2]; };

  if (frames == 0) {
    L.log_p = target.empty() ? 0.0 : kNegInf;
    return L;
  }
  L.alpha.assign(frames * S, kNegInf);
  L.alpha[0] = at(0, 0);
  if (S > 1) L.alpha[1] = at(0, 1);
  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double a = L.alpha[(t - 1) * S + s];
      if (s >= 1) a = LogAdd(a, L.alpha[(t - 1) * S + s - 1]);
      if (can_skip(s)) a = LogAdd(a, L.alpha[(t - 1) * S + s - 2]);
      L.alpha[t * S + s] = a == kNegInf ? kNegInf : a + at(t, s);
    }
  }
  const std::size_t last = (frames - 1) * S;
  L.log_p = L.alpha[last + S - 1];
  if (S > 1) L.log_p = LogAdd(L.log_p, L.alpha[last + S - 2]);

  if (with_beta) {
    L.beta.assign(frames * S, kNegInf);
    L.beta[last + S - 1] = at(frames - 1, S - 1);
    if (S > 1) L.beta[last + S - 2] = at(frames - 1, S - 2);
    for (std::size_t t = frames - 1; t-- > 0;) {
      for (std::size_t s = 0; s < S; ++s) {
        double b = L.beta[(t + 1) * S + s];
        if (s + 1 < S) b = LogAdd(b, L.beta[(t + 1) * S + s + 1]);
        if (s + 2 < S && can_skip(s + 2)) b = LogAdd(b, L.beta[(t + 1) * S + s + 2]);
        L.beta[t * S + s] = b == kNegInf ? kNegInf : b + at(t, s);
      }
    }
  }
  return L;
}

}  // namespace

std::size_t CtcMinFrames(std::span<const int> target) {
  std::size_t n = target.size();
  for (std::size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++n;
  return n;
}

double CtcLogLikelihood(std::span<const double> log_probs, std::size_t frames, std::size_t vocab,
                        std::span<const int> target) {
  if (log_probs.size() != frames * vocab) throw CtcError("log_probs size does not match T x V");
  return Forward(log_probs, frames, vocab, target, false).log_p;
}

nn::Tensor CtcLoss(const nn::Tensor& log_probs, std::span<const int> target) {
  if (log_probs.rank() != 2) {
    throw nn::ShapeError("CTC expects T x V log-probs, got " + nn::ShapeString(log_probs.shape()));
  }
  const std::size_t T = log_probs.dim(0), V = log_probs.dim(1);
  const auto lp = log_probs.values();
  Lattice L = Forward(lp, T, V, target, true);
  if (L.log_p == kNegInf) throw CtcError("target has zero probability under the CTC lattice");

  const double loss = -L.log_p;
  std::vector<double> lpv(lp.begin(), lp.end());
  auto backward = [L = std::move(L), lpv = std::move(lpv)](std::span<const double>,
                                                           std::span<const double> g,
                                                           std::span<double* const> pg) {
    if (!pg[0]) return;
    const std::size_t T = L.frames, V = L.vocab, S = L.states;
    std::vector<double> occ(V);
    for (std::size_t t = 0; t < T; ++t) {
      std::fill(occ.begin(), occ.end(), kNegInf);
      for (std::size_t s = 0; s < S; ++s) {
        const double ab = L.alpha[t * S + s] + L.beta[t * S + s];
        if (ab != kNegInf) occ[L.ext[s]] = LogAdd(occ[L.ext[s]], ab);
      }
      for (std::size_t k = 0; k < V; ++k) {
        if (occ[k] == kNegInf) continue;
        pg[0][t * V + k] -= g[0] * std::exp(occ[k] - lpv[t * V + k] - L.log_p);
      }
    }
  };
  return nn::Tensor::FromOp("ctc_loss", {}, {loss},
                            {log_probs}, std::move(backward));
}

std::vector<int> CollapsePath(std::span<const int> path) {
  std::vector<int> out;
  int prev = -1;
  for (int k : path) {
    if (k != prev && k != kBlank) out.push_back(k);
    prev = k;
  }
  return out;
}

std::vector<int> CtcGreedyDecode(std::span<const double> log_probs, std::size_t frames,
                                 std::size_t vocab) {
  if (log_probs.size() != frames * vocab) throw CtcError("log_probs size does not match T x V");
  std::vector<int> path(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* row = log_probs.data() + t * vocab;
    path[t] = static_cast<int>(std::max_element(row, row + vocab) - row);
  }
  return CollapsePath(path);
}

std::vector<int> CtcGreedyDecode(const nn::Tensor& log_probs) {
  return CtcGreedyDecode(log_probs.values(), log_probs.dim(0), log_probs.dim(1));
}

std::vector<int> CtcBeamDecode(std::span<const double> log_probs, std::size_t frames,
                               std::size_t vocab, std::size_t beam_width) {
  if (beam_width == 0) throw CtcError("beam_width must be at least 1");
  if (beam_width == 1) return CtcGreedyDecode(log_probs, frames, vocab);
  if (log_probs.size() != frames * vocab) throw CtcError("log_probs size does not match T x V");

  struct Score {
    double blank = kNegInf, label = kNegInf;
    double total() const { return LogAdd(blank, label); }
  };
  using Beams = std::map<std::vector<int>, Score>;
  auto ranked = [](const Beams& beams) {
    std::vector<std::pair<double, const std::vector<int>*>> r;
    for (const auto& [prefix, score] : beams) r.emplace_back(score.total(), &prefix);
    std::stable_sort(r.begin(), r.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    return r;
  };

  Beams beams;
  beams[{}].blank = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    const double* row = log_probs.data() + t * vocab;
    Beams next;
    for (const auto& [prefix, score] : beams) {
      const double total = score.total();
      Score& same = next[prefix];
      same.blank = LogAdd(same.blank, total + row[kBlank]);
      for (std::size_t k = 1; k < vocab; ++k) {
        const int label = static_cast<int>(k);
        std::vector<int> extended = prefix;
        extended.push_back(label);
        Score& ext = next[extended];
        if (!prefix.empty() && prefix.back() == label) {
          ext.label = LogAdd(ext.label, score.blank + row[k]);
          Score& stay = next[prefix];
          stay.label = LogAdd(stay.label, score.label + row[k]);
        } else {
          ext.label = LogAdd(ext.label, total + row[k]);
        }
      }
    }
    // Map order is lexicographic and the sort is stable, so equal scores keep
    // the smaller prefix first.
    auto order = ranked(next);
    Beams kept;
    for (std::size_t i = 0; i < order.size() && i < beam_width; ++i) {
      kept.emplace(*order[i].second, next.at(*order[i].second));
    }
    beams = std::move(kept);
  }
  return *ranked(beams).front().second;
}

std::vector<int> CtcBeamDecode(const nn::Tensor& log_probs, std::size_t beam_width) {
  return CtcBeamDecode(log_probs.values(), log_probs.dim(0), log_probs.dim(1), beam_width);
}

}  // namespace slmforge::asr
