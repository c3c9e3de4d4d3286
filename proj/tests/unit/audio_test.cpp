// tests/unit/audio_test.cpp

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

#include <gtest/gtest.h>

#include <cmath>

#include "slmforge/audio/fft.hpp"
#include "slmforge/audio/spectral.hpp"
#include "slmforge/audio/wav.hpp"
#include "slmforge/common/rng.hpp"
#include "synth.hpp"

namespace slmforge::audio {
namespace {

using testing::Noise;
using testing::Tone;

TEST(Wav, Pcm16RoundTripWithinQuantization) {
  const AudioBuffer a = Tone(440.0, 0.1, 0.7);
  const AudioBuffer b = DecodeWav(EncodeWav(a, WavEncoding::kPcm16));
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(b.sample_rate, 16000);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.samples[i], b.samples[i], 1.0 / 32767);
}

TEST(Wav, Float32RoundTrip) {
  const AudioBuffer a = Noise(0.05, 0.9, 3, 22050);
  const AudioBuffer b = DecodeWav(EncodeWav(a, WavEncoding::kFloat32));
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(b.sample_rate, 22050);
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_EQ(static_cast<float>(a.samples[i]), b.samples[i]);
}

TEST(Wav, Errors) {
  try {
    ReadWav("/nonexistent/x.wav");
    FAIL();
  } catch (const WavError& e) {
    EXPECT_EQ(e.kind(), WavErrorKind::kMissingFile);
  }
  try {
    DecodeWav("RIFF\x10\0\0\0JUNK");
    FAIL();
  } catch (const WavError& e) {
    EXPECT_EQ(e.kind(), WavErrorKind::kMalformedHeader);
  }
  std::string bytes = EncodeWav(Tone(100, 0.1));
  bytes.resize(bytes.size() - 100);
  try {
    DecodeWav(bytes);
    FAIL();
  } catch (const WavError& e) {
    EXPECT_EQ(e.kind(), WavErrorKind::kTruncatedData);
  }
}

TEST(Audio, DownmixAverages) {
  const std::vector<double> stereo{1.0, 0.0, 0.5, 0.5, -1.0, 1.0};
  EXPECT_EQ(Downmix(stereo, 2), (std::vector<double>{0.5, 0.5, 0.0}));
}

TEST(Audio, ResampleSameRateIsIdentity) {
  const AudioBuffer a = Noise(0.2, 0.5, 11);
  const AudioBuffer b = Resample(a, a.sample_rate);
  EXPECT_EQ(a.samples, b.samples);
}

TEST(Audio, ResampleChangesLength) {
  const AudioBuffer a = Tone(200.0, 1.0, 0.5, 8000);
  const AudioBuffer b = Resample(a, 16000);
  EXPECT_EQ(b.sample_rate, 16000);
  EXPECT_NEAR(b.duration_s(), 1.0, 1e-3);
  EXPECT_THROW(Resample(a, 0), ConfigError);
}

TEST(Audio, SliceClipsToBuffer) {
  const AudioBuffer a = Tone(200.0, 1.0);
  EXPECT_EQ(a.Slice(0.25, 0.5).size(), 8000u);
  EXPECT_EQ(a.Slice(0.9, 0.5).size(), 1600u);
}

TEST(Fft, MatchesNaiveDft) {
  Rng rng(5);
  const int n = 16;
  std::vector<double> x(n);
  for (auto& v : x) v = rng.Uniform(-1, 1);
  RealFft fft(n);
  std::vector<std::complex<double>> out(fft.bins());
  fft.Forward(x, out);
  for (int k = 0; k < fft.bins(); ++k) {
    std::complex<double> ref = 0;
    for (int t = 0; t < n; ++t) ref += x[t] * std::polar(1.0, -2.0 * M_PI * k * t / n);
    EXPECT_NEAR(std::abs(out[k] - ref), 0.0, 1e-12);
  }
  std::vector<double> back(n);
  fft.Inverse(out, back);
  for (int t = 0; t < n; ++t) EXPECT_NEAR(back[t] / n, x[t], 1e-12);
}

TEST(Spectral, ZeroSignalHasZeroMagnitude) {
  const SpectralConfig cfg;
  const FeatureMatrix m = StftMagnitude(testing::Silence(0.3), cfg);
  ASSERT_GT(m.rows, 0u);
  for (double v : m.data) EXPECT_EQ(v, 0.0);
}

TEST(Spectral, LogMelShiftsByOneFrame) {
  const SpectralConfig cfg;
  const int hop = cfg.HopSamples(16000);
  const AudioBuffer a = Noise(0.5, 0.5, 21);
  AudioBuffer shifted = a;
  shifted.samples.insert(shifted.samples.begin(), hop, 0.0);
  const FeatureMatrix fa = LogMel(a, cfg);
  const FeatureMatrix fb = LogMel(shifted, cfg);
  ASSERT_EQ(fb.rows, fa.rows + 1);
  for (std::size_t t = 1; t + 1 < fa.rows; ++t)
    for (std::size_t d = 0; d < fa.cols; ++d) EXPECT_NEAR(fa.at(t, d), fb.at(t + 1, d), 1e-6);
}

TEST(Spectral, MfccInvertsWhenFullRank) {
  SpectralConfig cfg;
  const FeatureMatrix lm = LogMel(Noise(0.2, 0.3, 4), cfg);
  const FeatureMatrix c = Mfcc(lm, cfg.n_mels);
  ASSERT_EQ(c.cols, lm.cols);
  for (std::size_t t = 0; t < lm.rows; ++t) {
    const auto back = InverseDct2(c.row(t), lm.cols);
    for (std::size_t d = 0; d < lm.cols; ++d) EXPECT_NEAR(back[d], lm.at(t, d), 1e-6);
  }
}

TEST(Spectral, DctMatchesDefinition) {
  const std::vector<double> x{1.0, -2.0, 0.5, 3.0};
  const auto c = Dct2(x);
  const std::size_t n = x.size();
  for (std::size_t k = 0; k < n; ++k) {
    double ref = 0;
    for (std::size_t i = 0; i < n; ++i) ref += x[i] * std::cos(M_PI * k * (i + 0.5) / n);
    ref *= std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    EXPECT_NEAR(c[k], ref, 1e-12);
  }
}

TEST(Spectral, ToneEnergyLandsInItsMelBand) {
  SpectralConfig cfg;
  const FeatureMatrix m = LogMel(Tone(1000.0, 0.3), cfg);
  const auto fb = MelFilterbank(cfg.n_mels, cfg.fft_size, 16000, cfg.fmin_hz, cfg.fmax_hz);
  const std::size_t mid = m.rows / 2;
  std::size_t best = 0;
  for (std::size_t d = 1; d < m.cols; ++d)
    if (m.at(mid, d) > m.at(mid, best)) best = d;
  const double bin = 1000.0 * cfg.fft_size / 16000;
  EXPECT_GT(fb[best][static_cast<std::size_t>(bin)], 0.0);
}

TEST(Spectral, ConfigValidation) {
  SpectralConfig cfg;
  cfg.n_mfcc = 50;
  EXPECT_THROW(cfg.Validate(16000), ConfigError);
  cfg = SpectralConfig{};
  cfg.fmax_hz = 9000;
  EXPECT_THROW(cfg.Validate(16000), ConfigError);
  cfg = SpectralConfig{};
  cfg.fft_size = 256;
  EXPECT_THROW(cfg.Validate(16000), ConfigError);
}

}  // namespace
}  // namespace slmforge::audio
