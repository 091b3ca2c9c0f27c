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

#ifndef PAMKIT_FFT_H_
#define PAMKIT_FFT_H_

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace pamkit {

// Real-input DFT of a fixed size, backed by FFTW. Plans are shared per size
// and created under a lock; transforms themselves are safe to run from
// several threads at once.
class RealFft {
 public:
  explicit RealFft(std::size_t size);

  std::size_t size() const { return size_; }
  std::size_t num_bins() const { return size_ / 2 + 1; }

  // `in` has size() values; `out` receives num_bins() coefficients.
  void Forward(std::span<const double> in,
               std::span<std::complex<double>> out) const;
  // Inverse of Forward including the 1/size scaling.
  void Inverse(std::span<const std::complex<double>> in,
               std::span<double> out) const;

  struct Plans;

 private:
  std::size_t size_;
  std::shared_ptr<const Plans> plans_;
};

// Linear convolution of a and b, length a.size() + b.size() - 1.
std::vector<double> FftConvolve(std::span<const double> a,
                                std::span<const double> b);

}  // namespace pamkit

#endif  // PAMKIT_FFT_H_
