// src/curate/separation.cpp

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

#include "slmforge/curate/separation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "slmforge/audio/fft.hpp"
#include "slmforge/audio/wav.hpp"
#include "slmforge/common/subprocess.hpp"

namespace slmforge::curate {

std::string StderrExcerpt(const std::string& stderr_data) {
  constexpr std::size_t kMax = 400;
  std::string s = stderr_data.size() > kMax ? stderr_data.substr(stderr_data.size() - kMax) : stderr_data;
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

audio::AudioBuffer HighPass(const audio::AudioBuffer& buf, double cutoff_hz) {
  audio::AudioBuffer out = buf;
  if (buf.empty() || cutoff_hz <= 0.0 || cutoff_hz >= buf.sample_rate / 2.0) return out;
  const double w0 = 2.0 * M_PI * cutoff_hz / buf.sample_rate;
  const double alpha = std::sin(w0) / (2.0 * M_SQRT1_2);
  const double cw = std::cos(w0);
  const double a0 = 1.0 + alpha;
  const double b0 = (1.0 + cw) / 2.0 / a0, b1 = -(1.0 + cw) / a0, b2 = b0;
  const double a1 = -2.0 * cw / a0, a2 = (1.0 - alpha) / a0;
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (auto& s : out.samples) {
    const double x = s;
    const double y = b0 * x + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = y;
    s = y;
  }
  return out;
}

audio::AudioBuffer SpectralGate(const audio::AudioBuffer& buf, const SpectralGateConfig& cfg) {
  audio::AudioBuffer hp = HighPass(buf, cfg.highpass_hz);
  if (hp.empty()) return hp;
  const int n = cfg.fft_size, hop = cfg.hop;
  const std::size_t len = hp.size();
  // Pad so every sample is covered by two frames.
  const std::size_t pad = static_cast<std::size_t>(n - hop);
  const std::size_t frames = (len + pad + hop - 1) / hop + 1;
  std::vector<double> padded(frames * hop + n, 0.0);
  std::copy(hp.samples.begin(), hp.samples.end(), padded.begin() + pad);

  std::vector<double> win(n);
  for (int i = 0; i < n; ++i) win[i] = std::sqrt(0.5 - 0.5 * std::cos(2.0 * M_PI * i / n));

  audio::RealFft fft(n);
  const int bins = fft.bins();
  std::vector<std::complex<double>> spec(frames * bins);
  std::vector<double> frame(n);
  for (std::size_t f = 0; f < frames; ++f) {
    for (int i = 0; i < n; ++i) frame[i] = padded[f * hop + i] * win[i];
    fft.Forward(frame, std::span(spec.data() + f * bins, bins));
  }

  std::vector<double> floor(bins), column(frames);
  for (int k = 0; k < bins; ++k) {
    for (std::size_t f = 0; f < frames; ++f) column[f] = std::abs(spec[f * bins + k]);
    const std::size_t idx = static_cast<std::size_t>(cfg.floor_percentile * (frames - 1));
    std::nth_element(column.begin(), column.begin() + idx, column.end());
    floor[k] = column[idx];
  }
  std::vector<double> smooth(bins), window;
  for (int k = 0; k < bins; ++k) {
    window.assign(floor.begin() + std::max(0, k - cfg.smooth_bins),
                  floor.begin() + std::min(bins, k + cfg.smooth_bins + 1));
    std::nth_element(window.begin(), window.begin() + window.size() / 2, window.end());
    smooth[k] = window[window.size() / 2];
  }

  std::vector<double> out(padded.size(), 0.0);
  for (std::size_t f = 0; f < frames; ++f) {
    auto* row = spec.data() + f * bins;
    for (int k = 0; k < bins; ++k) {
      if (!(std::abs(row[k]) > cfg.keep_ratio * smooth[k])) row[k] *= cfg.attenuation;
    }
    fft.Inverse(std::span<const std::complex<double>>(row, bins), frame);
    for (int i = 0; i < n; ++i) out[f * hop + i] += frame[i] * win[i] / n;
  }
  audio::AudioBuffer result;
  result.sample_rate = hp.sample_rate;
  result.samples.assign(out.begin() + pad, out.begin() + pad + len);
  return result;
}

audio::AudioBuffer ExternalSeparate(const audio::AudioBuffer& buf, const std::string& command) {
  ProcessResult r = RunProcess(command, audio::EncodeWav(buf, audio::WavEncoding::kFloat32));
  if (r.exit_code != 0) {
    throw StageError("separation", "command '" + command + "' exited with code " +
                                       std::to_string(r.exit_code),
                     r.exit_code, StderrExcerpt(r.stderr_data));
  }
  audio::AudioBuffer out;
  try {
    out = audio::DecodeWav(r.stdout_data);
  } catch (const Error& e) {
    throw StageError("separation", std::string("malformed WAV from separator: ") + e.what(), 0,
                     StderrExcerpt(r.stderr_data));
  }
  if (out.sample_rate != buf.sample_rate || out.size() != buf.size()) {
    throw StageError("separation", "separator changed the rate or length of the audio", 0,
                     StderrExcerpt(r.stderr_data));
  }
  return out;
}

audio::AudioBuffer SeparateSources(const audio::AudioBuffer& buf, const PipelineConfig& cfg) {
  if (cfg.separator == "passthrough") return buf;
  if (cfg.separator == "spectral-gate") return SpectralGate(buf);
  if (cfg.separator == "external") return ExternalSeparate(buf, cfg.separator_command);
  throw ConfigError("unknown separator '" + cfg.separator + "'");
}

}  // namespace slmforge::curate
