// include/slmforge/ssl/kmeans.hpp

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
#include <span>
#include <vector>

#include "slmforge/audio/audio.hpp"
#include "slmforge/common/error.hpp"
#include "slmforge/nn/checkpoint.hpp"

namespace slmforge::ssl {

class KMeansError : public Error {
 public:
  using Error::Error;
};

// K centroids of dimension dim, row-major.
struct Codebook {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> centroids;
  audio::FeatureKind kind = audio::FeatureKind::kMfcc;
  int iterations = 0;
  double inertia = 0.0;
  // Inertia after every assignment step, in order.
  std::vector<double> inertia_history;

  std::span<const double> centroid(std::size_t i) const {
    return {centroids.data() + i * dim, dim};
  }
};

// Row-major N x dim points.
struct PointSet {
  std::span<const double> data;
  std::size_t dim = 0;
  std::size_t size() const { return dim ? data.size() / dim : 0; }
  std::span<const double> point(std::size_t i) const { return data.subspan(i * dim, dim); }
};

// k-means++ seeding followed by Lloyd iterations until the assignment stops
// changing or max_iters updates have run. An empty cluster is re-seeded with
// the point farthest from its centroid. Throws KMeansError with fewer than k
// distinct points.
Codebook KMeansFit(const PointSet& points, std::size_t k, int max_iters, std::uint64_t seed,
                   audio::FeatureKind kind = audio::FeatureKind::kMfcc);

// Index of the nearest centroid (squared Euclidean), lowest index on ties.
int NearestCentroid(const Codebook& codebook, std::span<const double> x);

std::vector<int> AssignLabels(const Codebook& codebook, const audio::FeatureMatrix& features);
std::vector<int> AssignLabels(const Codebook& codebook, const PointSet& points);

double Inertia(const Codebook& codebook, const PointSet& points);

// Codebooks share the checkpoint container, tagged kind=codebook.
nn::Checkpoint CodebookToCheckpoint(const Codebook& codebook);
Codebook CodebookFromCheckpoint(const nn::Checkpoint& ckpt);

}  // namespace slmforge::ssl
