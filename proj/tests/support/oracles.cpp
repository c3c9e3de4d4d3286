// tests/support/oracles.cpp

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

#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>

#include "slmforge/common/rng.hpp"
#include "slmforge/nn/ops.hpp"

namespace slmforge::testing {
namespace {

std::vector<int> Collapse(const std::vector<int>& path) {
  std::vector<int> out;
  int prev = -1;
  for (int s : path) {
    if (s != prev && s != 0) out.push_back(s);
    prev = s;
  }
  return out;
}

// Calls fn(path, log_prob) for every path.
template <typename Fn>
void EnumeratePaths(const std::vector<double>& lp, std::size_t frames, std::size_t vocab, Fn&& fn) {
  std::vector<int> path(frames, 0);
  while (true) {
    double logp = 0.0;
    for (std::size_t t = 0; t < frames; ++t) logp += lp[t * vocab + path[t]];
    fn(path, logp);
    std::size_t t = 0;
    while (t < frames && ++path[t] == static_cast<int>(vocab)) path[t++] = 0;
    if (t == frames) break;
  }
}

template <typename Seq>
std::size_t Recurse(const Seq& a, const Seq& b, std::size_t i, std::size_t j,
                    std::vector<std::vector<std::size_t>>& memo) {
  if (i == 0) return j;
  if (j == 0) return i;
  auto& m = memo[i][j];
  if (m != std::numeric_limits<std::size_t>::max()) return m;
  const std::size_t del = Recurse(a, b, i - 1, j, memo) + 1;
  const std::size_t ins = Recurse(a, b, i, j - 1, memo) + 1;
  const std::size_t sub = Recurse(a, b, i - 1, j - 1, memo) + (a[i - 1] == b[j - 1] ? 0 : 1);
  m = std::min({del, ins, sub});
  return m;
}

template <typename Seq>
std::size_t MemoEdit(const Seq& a, const Seq& b) {
  std::vector<std::vector<std::size_t>> memo(
      a.size() + 1, std::vector<std::size_t>(b.size() + 1, std::numeric_limits<std::size_t>::max()));
  return Recurse(a, b, a.size(), b.size(), memo);
}

std::u32string NoSpaceCodepoints(const std::string& s) {
  std::u32string out;
  for (unsigned char c : s)
    if (!std::isspace(c)) out.push_back(c);
  return out;
}

}  // namespace

double BruteCtcProbability(const std::vector<double>& lp, std::size_t frames, std::size_t vocab,
                           const std::vector<int>& target) {
  double total = 0.0;
  EnumeratePaths(lp, frames, vocab, [&](const std::vector<int>& path, double logp) {
    if (Collapse(path) == target) total += std::exp(logp);
  });
  return total;
}

std::vector<int> BruteBestLabeling(const std::vector<double>& lp, std::size_t frames,
                                   std::size_t vocab) {
  std::map<std::vector<int>, double> mass;
  EnumeratePaths(lp, frames, vocab, [&](const std::vector<int>& path, double logp) {
    mass[Collapse(path)] += std::exp(logp);
  });
  auto best = mass.begin();
  for (auto it = mass.begin(); it != mass.end(); ++it)
    if (it->second > best->second) best = it;
  return best->first;
}

std::size_t RecursiveEditDistance(const std::vector<std::string>& a,
                                  const std::vector<std::string>& b) {
  return MemoEdit(a, b);
}

std::size_t RecursiveEditDistance(const std::u32string& a, const std::u32string& b) {
  return MemoEdit(a, b);
}

double BruteChrf(const std::vector<std::string>& refs, const std::vector<std::string>& hyps,
                 int max_n, double beta) {
  std::vector<double> match(max_n, 0), hyp_total(max_n, 0), ref_total(max_n, 0);
  bool identical = true;
  for (std::size_t p = 0; p < refs.size(); ++p) {
    const std::u32string r = NoSpaceCodepoints(refs[p]);
    const std::u32string h = NoSpaceCodepoints(hyps[p]);
    identical = identical && r == h;
    for (int n = 1; n <= max_n; ++n) {
      std::vector<std::u32string> rg, hg;
      for (std::size_t i = 0; i + n <= r.size(); ++i) rg.push_back(r.substr(i, n));
      for (std::size_t i = 0; i + n <= h.size(); ++i) hg.push_back(h.substr(i, n));
      std::vector<bool> used(rg.size(), false);
      for (const auto& g : hg) {
        for (std::size_t k = 0; k < rg.size(); ++k) {
          if (!used[k] && rg[k] == g) {
            used[k] = true;
            match[n - 1] += 1;
            break;
          }
        }
      }
      hyp_total[n - 1] += hg.size();
      ref_total[n - 1] += rg.size();
    }
  }
  double prec = 0, rec = 0;
  int orders = 0;
  for (int n = 0; n < max_n; ++n) {
    if (hyp_total[n] > 0 && ref_total[n] > 0) {
      prec += match[n] / hyp_total[n];
      rec += match[n] / ref_total[n];
      ++orders;
    }
  }
  if (orders == 0) return identical ? 100.0 : 0.0;
  prec /= orders;
  rec /= orders;
  if (prec == 0 && rec == 0) return 0.0;
  return 100.0 * (1 + beta * beta) * prec * rec / (beta * beta * prec + rec);
}

double MaxGradError(const std::function<nn::Tensor(const std::vector<nn::Tensor>&)>& f,
                    const std::vector<nn::Tensor>& inputs, GradCheckOptions opts) {
  nn::Tensor probe = f(inputs);
  Rng rng(0x9e3779b97f4a7c15ULL);
  std::vector<double> w(probe.size());
  for (auto& x : w) x = rng.Uniform(-1.0, 1.0);
  const nn::Tensor weights = nn::Tensor::Constant(w, probe.shape());
  auto objective = [&] {
    const nn::Tensor out = f(inputs);
    return out.rank() == 0 ? out : nn::Sum(nn::Mul(out, weights));
  };
  for (nn::Tensor in : inputs) in.ClearGrad();
  objective().Backward();

  double worst = 0.0;
  for (const auto& in : inputs) {
    if (!in.requires_grad()) continue;
    nn::Tensor leaf = in;
    const std::vector<double> analytic(leaf.grad().begin(), leaf.grad().end());
    auto vals = leaf.mutable_values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double orig = vals[i];
      auto at = [&](double offset) {
        vals[i] = orig + offset;
        return objective().item();
      };
      const double h = opts.step;
      // Five-point stencil, truncation error O(h^4).
      const double numeric = (at(-2 * h) - 8 * at(-h) + 8 * at(h) - at(2 * h)) / (12 * h);
      vals[i] = orig;
      const double scale = std::max({std::fabs(analytic[i]), std::fabs(numeric), opts.floor});
      worst = std::max(worst, std::fabs(analytic[i] - numeric) / scale);
    }
  }
  return worst;
}

nn::Tensor RandomLeaf(const nn::Shape& shape, std::uint64_t seed, double lo, double hi,
                      bool requires_grad) {
  Rng rng(seed);
  std::vector<double> v(nn::NumElements(shape));
  for (auto& x : v) x = rng.Uniform(lo, hi);
  return nn::Tensor::Leaf(std::move(v), shape, requires_grad);
}

}  // namespace slmforge::testing
