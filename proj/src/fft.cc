/*
 * Copyright 2026 The pamkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pamkit/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <vector>

#include "pamkit/error.h"

namespace pamkit {

struct RealFft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

namespace {

// FFTW's planner is not reentrant.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

std::shared_ptr<const RealFft::Plans> PlansForSize(std::size_t n) {
  static std::map<std::size_t, std::shared_ptr<const RealFft::Plans>> cache;
  std::lock_guard lock(PlannerMutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const int size = static_cast<int>(n);
  std::vector<double> real(n);
  std::vector<fftw_complex> spec(n / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  auto plans = std::make_shared<RealFft::Plans>();
  plans->forward = fftw_plan_dft_r2c_1d(size, real.data(), spec.data(), flags);
  plans->inverse = fftw_plan_dft_c2r_1d(size, spec.data(), real.data(), flags);
  if (!plans->forward || !plans->inverse) throw Error("FFTW planning failed");
  cache.emplace(n, plans);
  return plans;
}

}  // namespace

RealFft::RealFft(std::size_t size) : size_(size) {
  if (size < 2) throw Error("FFT size must be at least 2");
  plans_ = PlansForSize(size);
}

void RealFft::Forward(std::span<const double> in,
                      std::span<std::complex<double>> out) const {
  if (in.size() != size_ || out.size() != num_bins()) {
    throw Error("RealFft::Forward buffer size mismatch");
  }
  std::vector<double> work(in.begin(), in.end());
  fftw_execute_dft_r2c(plans_->forward, work.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::Inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) const {
  if (in.size() != num_bins() || out.size() != size_) {
    throw Error("RealFft::Inverse buffer size mismatch");
  }
  // c2r overwrites its input.
  std::vector<std::complex<double>> work(in.begin(), in.end());
  fftw_execute_dft_c2r(plans_->inverse,
                       reinterpret_cast<fftw_complex*>(work.data()), out.data());
  const double scale = 1.0 / static_cast<double>(size_);
  for (double& v : out) v *= scale;
}

std::vector<double> FftConvolve(std::span<const double> a,
                                std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t n_out = a.size() + b.size() - 1;
  std::size_t n = 2;
  while (n < n_out) n *= 2;
  RealFft fft(n);
  std::vector<double> pa(n, 0.0), pb(n, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  std::vector<std::complex<double>> fa(fft.num_bins()), fb(fft.num_bins());
  fft.Forward(pa, fa);
  fft.Forward(pb, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  fft.Inverse(fa, pa);
  pa.resize(n_out);
  return pa;
}

}  // namespace pamkit
