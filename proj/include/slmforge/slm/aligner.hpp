// include/slmforge/slm/aligner.hpp

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
#include <vector>

#include "slmforge/audio/audio.hpp"
#include "slmforge/nn/layers.hpp"
#include "slmforge/ssl/encoder.hpp"

namespace slmforge::slm {

// Transformer layers 1..L.
std::vector<std::size_t> DefaultLayers(const ssl::SpeechEncoder& encoder);

// Per output frame, the hidden states of `layers` concatenated in the given
// order. Layer 0 is the front-end output. Throws ConfigError on an invalid
// index or an empty selection.
audio::FeatureMatrix ExtractMultilayerFeatures(const ssl::SpeechEncoder& encoder,
                                               const audio::FeatureMatrix& features,
                                               const std::vector<std::size_t>& layers);

// One hidden layer with ReLU: fc2(relu(fc1(x))).
class SpeechAligner : public nn::Module {
 public:
  SpeechAligner(std::size_t input_dim, std::size_t hidden, std::size_t output_dim, Rng& rng);
  nn::Tensor Forward(const nn::Tensor& x) const;
  std::size_t input_dim() const { return fc1_.in_features(); }
  std::size_t hidden_dim() const { return fc1_.out_features(); }
  std::size_t output_dim() const { return fc2_.out_features(); }
  nn::Linear& fc1() { return fc1_; }
  nn::Linear& fc2() { return fc2_; }

 private:
  nn::Linear fc1_, fc2_;
};

}  // namespace slmforge::slm
