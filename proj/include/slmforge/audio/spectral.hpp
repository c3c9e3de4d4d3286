// include/slmforge/audio/spectral.hpp

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
#include <span>
#include <vector>

#include "slmforge/audio/audio.hpp"

namespace slmforge::audio {

struct SpectralConfig {
  double frame_len_ms = 25.0;
  double hop_ms = 10.0;
  int fft_size = 512;
  int n_mels = 40;
  int n_mfcc = 13;
  double fmin_hz = 20.0;
  double fmax_hz = 8000.0;
  double log_floor = 1e-10;

  int FrameSamples(int sample_rate) const;
  int HopSamples(int sample_rate) const;
  // Throws ConfigError when the configuration cannot be used at this rate.
  void Validate(int sample_rate) const;
};

// 1 + floor((n - frame) / hop) when n >= frame, else 0.
std::size_t NumFrames(std::size_t n_samples, std::size_t frame, std::size_t hop);

// Periodic Hann window.
std::vector<double> HannWindow(std::size_t n);

// HTK mel scale.
double HzToMel(double hz);
double MelToHz(double mel);

// n_mels x (fft_size/2 + 1) triangular filters with peaks equally spaced on
// the mel scale between fmin and fmax.
std::vector<std::vector<double>> MelFilterbank(int n_mels, int fft_size, int sample_rate,
                                               double fmin_hz, double fmax_hz);

// Magnitude STFT: T x (fft_size/2+1), Hann-windowed frames zero-padded to
// fft_size.
FeatureMatrix StftMagnitude(const AudioBuffer& buf, const SpectralConfig& cfg);

FeatureMatrix LogMel(const AudioBuffer& buf, const SpectralConfig& cfg);

// Orthonormal type-II DCT of each frame, keeping the first n_mfcc
// coefficients. Input must be a log-mel matrix.
FeatureMatrix Mfcc(const FeatureMatrix& logmel, int n_mfcc);

std::vector<double> Dct2(std::span<const double> x);
// Inverse of Dct2 (orthonormal type-III); missing trailing coefficients are
// treated as zero.
std::vector<double> InverseDct2(std::span<const double> coeffs, std::size_t n);

}  // namespace slmforge::audio
