// src/ssl/kmeans.cpp

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

#include "slmforge/ssl/kmeans.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "slmforge/common/rng.hpp"

namespace slmforge::ssl {
namespace {

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

std::size_t CountDistinct(const PointSet& points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    const auto pa = points.point(a), pb = points.point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (less(order[i - 1], order[i])) ++distinct;
  return distinct;
}

// Returns the inertia of the assignment.
double Assign(const Codebook& cb, const PointSet& points, std::vector<int>& labels,
              std::vector<double>* dists = nullptr) {
  labels.resize(points.size());
  if (dists) dists->resize(points.size());
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto x = points.point(i);
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cb.k; ++c) {
      const double d = SquaredDistance(x, cb.centroid(c));
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[i] = best;
    if (dists) (*dists)[i] = best_d;
    total += best_d;
  }
  return total;
}

}  // namespace

int NearestCentroid(const Codebook& codebook, std::span<const double> x) {
  if (x.size() != codebook.dim) {
    throw KMeansError("feature dimension " + std::to_string(x.size()) +
                      " does not match codebook dimension " + std::to_string(codebook.dim));
  }
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < codebook.k; ++c) {
    const double d = SquaredDistance(x, codebook.centroid(c));
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

Codebook KMeansFit(const PointSet& points, std::size_t k, int max_iters, std::uint64_t seed,
                   audio::FeatureKind kind) {
  if (k == 0) throw KMeansError("k must be at least 1");
  if (points.dim == 0) throw KMeansError("points have zero dimension");
  const std::size_t n = points.size();
  const std::size_t distinct = CountDistinct(points);
  if (distinct < k) {
    throw KMeansError("need at least " + std::to_string(k) + " distinct points, got " +
                      std::to_string(distinct));
  }

  Codebook cb;
  cb.k = k;
  cb.dim = points.dim;
  cb.kind = kind;
  cb.centroids.resize(k * points.dim);
  auto set_centroid = [&](std::size_t c, std::span<const double> x) {
    std::copy(x.begin(), x.end(), cb.centroids.begin() + c * cb.dim);
  };

  // k-means++ seeding. Points already chosen have weight 0, so seeds are
  // distinct.
  Rng rng(seed);
  set_centroid(0, points.point(rng.Below(n)));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = SquaredDistance(points.point(i), cb.centroid(0));
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    double r = rng.Uniform() * total;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      pick = i;
      r -= d2[i];
      if (r < 0.0) break;
    }
    set_centroid(c, points.point(pick));
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], SquaredDistance(points.point(i), cb.centroid(c)));
  }

  std::vector<int> labels, next;
  std::vector<double> dists;
  cb.inertia_history.push_back(Assign(cb, points, labels, &dists));
  std::vector<double> sums(k * cb.dim);
  std::vector<std::size_t> counts(k);
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = points.point(i);
      double* s = sums.data() + labels[i] * cb.dim;
      for (std::size_t j = 0; j < cb.dim; ++j) s[j] += x[j];
      ++counts[labels[i]];
    }
    std::vector<std::size_t> taken;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (std::size_t j = 0; j < cb.dim; ++j)
          cb.centroids[c * cb.dim + j] = sums[c * cb.dim + j] / static_cast<double>(counts[c]);
        continue;
      }
      // Empty cluster: move it onto the farthest point not already used.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::find(taken.begin(), taken.end(), i) != taken.end()) continue;
        if (dists[i] > far_d) {
          far_d = dists[i];
          far = i;
        }
      }
      taken.push_back(far);
      set_centroid(c, points.point(far));
    }
    cb.inertia_history.push_back(Assign(cb, points, next, &dists));
    if (next == labels) {
      ++iter;
      break;
    }
    labels.swap(next);
  }
  cb.iterations = iter;
  cb.inertia = cb.inertia_history.back();
  return cb;
}

std::vector<int> AssignLabels(const Codebook& codebook, const PointSet& points) {
  if (points.dim != codebook.dim) {
    throw KMeansError("feature dimension " + std::to_string(points.dim) +
                      " does not match codebook dimension " + std::to_string(codebook.dim));
  }
  std::vector<int> labels;
  Assign(codebook, points, labels);
  return labels;
}

std::vector<int> AssignLabels(const Codebook& codebook, const audio::FeatureMatrix& features) {
  return AssignLabels(codebook, PointSet{features.data, features.cols});
}

double Inertia(const Codebook& codebook, const PointSet& points) {
  std::vector<int> labels;
  return Assign(codebook, points, labels);
}

nn::Checkpoint CodebookToCheckpoint(const Codebook& codebook) {
  nn::Checkpoint ckpt;
  ckpt.metadata["kind"] = "codebook";
  ckpt.metadata["feature_kind"] = audio::FeatureKindName(codebook.kind);
  ckpt.metadata["iterations"] = std::to_string(codebook.iterations);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", codebook.inertia);
  ckpt.metadata["inertia"] = buf;
  ckpt.tensors.push_back({"centroids", {codebook.k, codebook.dim}, codebook.centroids});
  return ckpt;
}

Codebook CodebookFromCheckpoint(const nn::Checkpoint& ckpt) {
  if (ckpt.Meta("kind") != "codebook") throw KMeansError("checkpoint is not a codebook");
  const auto* t = ckpt.Find("centroids");
  if (!t || t->shape.size() != 2) throw KMeansError("codebook has no centroids tensor");
  Codebook cb;
  cb.k = t->shape[0];
  cb.dim = t->shape[1];
  cb.centroids = t->values;
  cb.kind = audio::ParseFeatureKind(ckpt.Meta("feature_kind", "mfcc"));
  cb.iterations = std::stoi(ckpt.Meta("iterations", "0"));
  cb.inertia = std::stod(ckpt.Meta("inertia", "0"));
  return cb;
}

}  // namespace slmforge::ssl
