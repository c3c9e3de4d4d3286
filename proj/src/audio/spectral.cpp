// src/audio/spectral.cpp

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

#include "slmforge/audio/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "slmforge/audio/fft.hpp"
#include "slmforge/common/error.hpp"

namespace slmforge::audio {

int SpectralConfig::FrameSamples(int sample_rate) const {
  return static_cast<int>(std::lround(frame_len_ms * sample_rate / 1000.0));
}

int SpectralConfig::HopSamples(int sample_rate) const {
  return static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0));
}

void SpectralConfig::Validate(int sample_rate) const {
  if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
  if (FrameSamples(sample_rate) < 1 || HopSamples(sample_rate) < 1) {
    throw ConfigError("frame and hop must each span at least one sample");
  }
  if (fft_size < FrameSamples(sample_rate)) {
    throw ConfigError("fft_size " + std::to_string(fft_size) + " shorter than frame of " +
                      std::to_string(FrameSamples(sample_rate)) + " samples");
  }
  if (!(fmin_hz >= 0.0 && fmin_hz < fmax_hz && fmax_hz <= sample_rate / 2.0)) {
    throw ConfigError("need 0 <= fmin < fmax <= sample_rate/2");
  }
  if (n_mels < 1) throw ConfigError("n_mels must be positive");
  if (n_mfcc < 1 || n_mfcc > n_mels) throw ConfigError("need 1 <= n_mfcc <= n_mels");
  if (!(log_floor > 0.0)) throw ConfigError("log_floor must be positive");
}

std::size_t NumFrames(std::size_t n_samples, std::size_t frame, std::size_t hop) {
  if (n_samples < frame || frame == 0 || hop == 0) return 0;
  return 1 + (n_samples - frame) / hop;
}

std::vector<double> HannWindow(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<std::vector<double>> MelFilterbank(int n_mels, int fft_size, int sample_rate,
                                               double fmin_hz, double fmax_hz) {
  const int bins = fft_size / 2 + 1;
  const double mel_lo = HzToMel(fmin_hz);
  const double mel_hi = HzToMel(fmax_hz);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));
  }
  std::vector<std::vector<double>> bank(n_mels, std::vector<double>(bins, 0.0));
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / fft_size;
      double w = 0.0;
      if (f > lo && f <= mid) {
        w = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      bank[m][k] = w;
    }
  }
  return bank;
}

FeatureMatrix StftMagnitude(const AudioBuffer& buf, const SpectralConfig& cfg) {
  cfg.Validate(buf.sample_rate);
  const auto frame = static_cast<std::size_t>(cfg.FrameSamples(buf.sample_rate));
  const auto hop = static_cast<std::size_t>(cfg.HopSamples(buf.sample_rate));
  const std::size_t frames = NumFrames(buf.size(), frame, hop);
  const int bins = cfg.fft_size / 2 + 1;
  FeatureMatrix out(frames, static_cast<std::size_t>(bins), cfg.hop_ms / 1000.0,
                    FeatureKind::kHidden);
  if (frames == 0) return out;

  const std::vector<double> window = HannWindow(frame);
  RealFft fft(cfg.fft_size);
  std::vector<double> scratch(cfg.fft_size, 0.0);
  std::vector<std::complex<double>> spec(bins);
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(scratch.begin(), scratch.end(), 0.0);
    const double* src = buf.samples.data() + t * hop;
    for (std::size_t i = 0; i < frame; ++i) scratch[i] = src[i] * window[i];
    fft.Forward(scratch, spec);
    for (int k = 0; k < bins; ++k) out.at(t, k) = std::abs(spec[k]);
  }
  return out;
}

FeatureMatrix LogMel(const AudioBuffer& buf, const SpectralConfig& cfg) {
  const FeatureMatrix mag = StftMagnitude(buf, cfg);
  const auto bank =
      MelFilterbank(cfg.n_mels, cfg.fft_size, buf.sample_rate, cfg.fmin_hz, cfg.fmax_hz);
  FeatureMatrix out(mag.rows, static_cast<std::size_t>(cfg.n_mels), cfg.hop_ms / 1000.0,
                    FeatureKind::kLogMel);
  for (std::size_t t = 0; t < mag.rows; ++t) {
    const auto row = mag.row(t);
    for (int m = 0; m < cfg.n_mels; ++m) {
      double acc = 0.0;
      const auto& filt = bank[m];
      for (std::size_t k = 0; k < row.size(); ++k) acc += filt[k] * row[k];
      out.at(t, m) = std::log(std::max(acc, cfg.log_floor));
    }
  }
  return out;
}

std::vector<double> Dct2(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  const double s0 = std::sqrt(1.0 / n), sk = std::sqrt(2.0 / n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += x[i] * std::cos(M_PI * k * (2.0 * i + 1.0) / (2.0 * n));
    }
    out[k] = acc * (k == 0 ? s0 : sk);
  }
  return out;
}

std::vector<double> InverseDct2(std::span<const double> coeffs, std::size_t n) {
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  const double s0 = std::sqrt(1.0 / n), sk = std::sqrt(2.0 / n);
  const std::size_t kmax = std::min(coeffs.size(), n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < kmax; ++k) {
      acc += coeffs[k] * (k == 0 ? s0 : sk) * std::cos(M_PI * k * (2.0 * i + 1.0) / (2.0 * n));
    }
    out[i] = acc;
  }
  return out;
}

FeatureMatrix Mfcc(const FeatureMatrix& logmel, int n_mfcc) {
  if (logmel.kind != FeatureKind::kLogMel) {
    throw ConfigError("mfcc expects log-mel input, got " + FeatureKindName(logmel.kind));
  }
  if (n_mfcc < 1 || static_cast<std::size_t>(n_mfcc) > logmel.cols) {
    throw ConfigError("n_mfcc " + std::to_string(n_mfcc) + " exceeds n_mels " +
                      std::to_string(logmel.cols));
  }
  // Precomputed basis; identical arithmetic to Dct2 per coefficient.
  const std::size_t n = logmel.cols;
  const double s0 = std::sqrt(1.0 / n), sk = std::sqrt(2.0 / n);
  std::vector<double> basis(static_cast<std::size_t>(n_mfcc) * n);
  for (int k = 0; k < n_mfcc; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      basis[k * n + i] = std::cos(M_PI * k * (2.0 * i + 1.0) / (2.0 * n));
    }
  }
  FeatureMatrix out(logmel.rows, static_cast<std::size_t>(n_mfcc), logmel.frame_hop_s,
                    FeatureKind::kMfcc);
  for (std::size_t t = 0; t < logmel.rows; ++t) {
    const auto row = logmel.row(t);
    for (int k = 0; k < n_mfcc; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += row[i] * basis[k * n + i];
      out.at(t, k) = acc * (k == 0 ? s0 : sk);
    }
  }
  return out;
}

}  // namespace slmforge::audio
