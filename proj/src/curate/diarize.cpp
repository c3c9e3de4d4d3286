// src/curate/diarize.cpp

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

#include "slmforge/curate/diarize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "slmforge/audio/spectral.hpp"

namespace slmforge::curate {

std::vector<double> ProxyEmbedding(const audio::AudioBuffer& window) {
  audio::SpectralConfig sc;
  const audio::FeatureMatrix m = audio::LogMel(window, sc);
  std::vector<double> v(2 * m.cols, 0.0);
  if (m.rows == 0) return v;
  for (std::size_t c = 0; c < m.cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) mean += m.at(r, c);
    mean /= static_cast<double>(m.rows);
    double var = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) var += (m.at(r, c) - mean) * (m.at(r, c) - mean);
    v[c] = mean;
    v[m.cols + c] = std::sqrt(var / static_cast<double>(m.rows));
  }
  double mu = 0.0;
  for (double x : v) mu += x;
  mu /= static_cast<double>(v.size());
  double norm = 0.0;
  for (double& x : v) {
    x -= mu;
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& x : v) x /= norm;
  return v;
}

double CosineDistance(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 1.0;
  return std::clamp(1.0 - dot / std::sqrt(na * nb), 0.0, 2.0);
}

std::vector<int> AgglomerativeCluster(const std::vector<std::vector<double>>& points,
                                      double threshold) {
  const std::size_t n = points.size();
  std::vector<int> owner(n);
  for (std::size_t i = 0; i < n; ++i) owner[i] = static_cast<int>(i);
  if (n == 0) return {};
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = CosineDistance(points[i], points[j]);
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> alive(n, true);
  while (true) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (alive[j] && dist[i][j] < best) {
          best = dist[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    if (!(best <= threshold)) break;
    // Lance-Williams update for average linkage.
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      const double d = (static_cast<double>(size[bi]) * dist[bi][k] +
                        static_cast<double>(size[bj]) * dist[bj][k]) /
                       static_cast<double>(size[bi] + size[bj]);
      dist[bi][k] = dist[k][bi] = d;
    }
    size[bi] += size[bj];
    alive[bj] = false;
    for (auto& o : owner)
      if (o == static_cast<int>(bj)) o = static_cast<int>(bi);
  }
  std::map<int, int> relabel;
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = relabel.emplace(owner[i], static_cast<int>(relabel.size())).first;
    labels[i] = it->second;
  }
  return labels;
}

std::vector<Span> Diarize(const audio::AudioBuffer& buf, const std::vector<Span>& spans,
                          const DiarizeConfig& cfg, const Embedder& embedder) {
  cfg.Validate();
  struct Window {
    std::size_t span;
    double start, end;
  };
  std::vector<Window> windows;
  for (std::size_t s = 0; s < spans.size(); ++s) {
    const double len = spans[s].duration_s();
    std::size_t count = static_cast<std::size_t>(std::floor(len / cfg.window_s));
    if (len - static_cast<double>(count) * cfg.window_s >= cfg.window_s / 2.0 || count == 0) ++count;
    for (std::size_t w = 0; w < count; ++w) {
      const double a = spans[s].start_s + static_cast<double>(w) * cfg.window_s;
      const double b = w + 1 == count ? spans[s].end_s : a + cfg.window_s;
      windows.push_back({s, a, b});
    }
  }
  std::vector<std::vector<double>> emb;
  emb.reserve(windows.size());
  for (const auto& w : windows) emb.push_back(embedder(buf.Slice(w.start, w.end - w.start)));
  const std::vector<int> labels = AgglomerativeCluster(emb, cfg.cluster_distance_threshold);

  std::vector<Span> out;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const std::string name = "S" + std::to_string(labels[i]);
    const bool extend = i > 0 && windows[i - 1].span == windows[i].span && out.back().speaker == name;
    if (extend) {
      out.back().end_s = windows[i].end;
    } else {
      out.push_back(Span{windows[i].start, windows[i].end, name});
    }
  }
  return out;
}

}  // namespace slmforge::curate
