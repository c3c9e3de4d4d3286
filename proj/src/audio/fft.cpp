// src/audio/fft.cpp

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

#include "slmforge/audio/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "slmforge/common/error.hpp"

namespace slmforge::audio {
namespace {
// The FFTW planner is not reentrant; execution is.
std::mutex g_planner_mutex;
}  // namespace

struct RealFft::Impl {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

RealFft::RealFft(int size) : size_(size), impl_(std::make_unique<Impl>()) {
  if (size < 2) throw ConfigError("FFT size must be at least 2");
  impl_->real = fftw_alloc_real(size);
  impl_->spec = fftw_alloc_complex(bins());
  std::lock_guard<std::mutex> lock(g_planner_mutex);
  impl_->forward = fftw_plan_dft_r2c_1d(size, impl_->real, impl_->spec, FFTW_ESTIMATE);
  impl_->inverse = fftw_plan_dft_c2r_1d(size, impl_->spec, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(g_planner_mutex);
  fftw_destroy_plan(impl_->forward);
  fftw_destroy_plan(impl_->inverse);
  fftw_free(impl_->real);
  fftw_free(impl_->spec);
}

void RealFft::Forward(std::span<const double> in, std::span<std::complex<double>> out) {
  std::memcpy(impl_->real, in.data(), sizeof(double) * size_);
  fftw_execute(impl_->forward);
  for (int k = 0; k < bins(); ++k) out[k] = {impl_->spec[k][0], impl_->spec[k][1]};
}

void RealFft::Inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  for (int k = 0; k < bins(); ++k) {
    impl_->spec[k][0] = in[k].real();
    impl_->spec[k][1] = in[k].imag();
  }
  fftw_execute(impl_->inverse);
  std::memcpy(out.data(), impl_->real, sizeof(double) * size_);
}

}  // namespace slmforge::audio
