// src/slm/aligner.cpp

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

#include "slmforge/slm/aligner.hpp"

#include "slmforge/common/error.hpp"

namespace slmforge::slm {

std::vector<std::size_t> DefaultLayers(const ssl::SpeechEncoder& encoder) {
  std::vector<std::size_t> layers;
  for (std::size_t l = 1; l <= encoder.config().layers; ++l) layers.push_back(l);
  return layers;
}

audio::FeatureMatrix ExtractMultilayerFeatures(const ssl::SpeechEncoder& encoder,
                                               const audio::FeatureMatrix& features,
                                               const std::vector<std::size_t>& layers) {
  if (layers.empty()) throw ConfigError("layer selection is empty");
  for (auto l : layers) {
    if (l > encoder.config().layers) {
      throw ConfigError("layer index " + std::to_string(l) + " outside 0.." +
                        std::to_string(encoder.config().layers));
    }
  }
  ssl::EncoderOutput out = encoder.Forward(features);
  const std::size_t t = out.final.dim(0);
  const std::size_t d = encoder.config().width;
  const double hop = features.frame_hop_s * static_cast<double>(encoder.config().TotalStride());
  audio::FeatureMatrix m(t, d * layers.size(), hop, audio::FeatureKind::kHidden);
  for (std::size_t j = 0; j < layers.size(); ++j) {
    const auto h = out.hidden[layers[j]].values();
    for (std::size_t r = 0; r < t; ++r)
      for (std::size_t c = 0; c < d; ++c) m.data[r * m.cols + j * d + c] = h[r * d + c];
  }
  return m;
}

SpeechAligner::SpeechAligner(std::size_t input_dim, std::size_t hidden, std::size_t output_dim,
                             Rng& rng)
    : fc1_(input_dim, hidden, rng), fc2_(hidden, output_dim, rng) {
  RegisterModule("fc1", &fc1_);
  RegisterModule("fc2", &fc2_);
}

nn::Tensor SpeechAligner::Forward(const nn::Tensor& x) const {
  if (x.rank() != 2 || x.dim(1) != input_dim()) {
    throw nn::ShapeError("aligner expects T x " + std::to_string(input_dim()) + ", got " +
                         nn::ShapeString(x.shape()));
  }
  return fc2_.Forward(nn::Relu(fc1_.Forward(x)));
}

}  // namespace slmforge::slm
