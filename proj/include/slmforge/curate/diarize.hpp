// include/slmforge/curate/diarize.hpp

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

#include <functional>
#include <vector>

#include "slmforge/audio/audio.hpp"
#include "slmforge/curate/types.hpp"

namespace slmforge::curate {

// Maps a window of audio to a unit-norm vector.
using Embedder = std::function<std::vector<double>(const audio::AudioBuffer&)>;

// Per-bin mean and standard deviation of log-mel over the window, centred on
// its own mean and L2-normalized.
std::vector<double> ProxyEmbedding(const audio::AudioBuffer& window);

double CosineDistance(const std::vector<double>& a, const std::vector<double>& b);

// Average-linkage agglomerative clustering; merges while the closest pair of
// clusters is within `threshold`. Cluster ids are numbered by first
// appearance.
std::vector<int> AgglomerativeCluster(const std::vector<std::vector<double>>& points,
                                      double threshold);

// Each span is cut into windows of window_s (a short remainder joins the
// window before it), windows are embedded and clustered, and runs of equal
// labels inside a span become labeled spans "S0", "S1", ....
std::vector<Span> Diarize(const audio::AudioBuffer& buf, const std::vector<Span>& spans,
                          const DiarizeConfig& cfg, const Embedder& embedder = ProxyEmbedding);

}  // namespace slmforge::curate
