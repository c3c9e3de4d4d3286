// include/slmforge/curate/separation.hpp

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

#include <string>

#include "slmforge/audio/audio.hpp"
#include "slmforge/curate/types.hpp"

namespace slmforge::curate {

struct SpectralGateConfig {
  double highpass_hz = 80.0;
  int fft_size = 512;
  int hop = 256;
  double floor_percentile = 0.10;
  int smooth_bins = 16;   // median over +/- this many bins
  double keep_ratio = 4.0;
  double attenuation = 0.05;
};

// Second-order Butterworth high-pass.
audio::AudioBuffer HighPass(const audio::AudioBuffer& buf, double cutoff_hz);

// High-pass, then STFT gating against a per-bin noise floor.
audio::AudioBuffer SpectralGate(const audio::AudioBuffer& buf, const SpectralGateConfig& cfg = {});

// WAV on stdin, WAV on stdout. The result must keep the rate and length.
audio::AudioBuffer ExternalSeparate(const audio::AudioBuffer& buf, const std::string& command);

audio::AudioBuffer SeparateSources(const audio::AudioBuffer& buf, const PipelineConfig& cfg);

// Last few hundred bytes of a stderr stream, for error messages.
std::string StderrExcerpt(const std::string& stderr_data);

}  // namespace slmforge::curate
