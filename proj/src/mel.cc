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

#include "pamkit/mel.h"

#include <algorithm>
#include <complex>
#include <numbers>
#include <string>

#include "pamkit/error.h"

namespace pamkit {

void ValidateAudioConfig(const AudioConfig& cfg) {
  if (cfg.sample_rate_hz <= 0) throw Error("audio_config: sample_rate_hz must be > 0");
  if (cfg.n_fft < 2) throw Error("audio_config: n_fft must be >= 2");
  if (cfg.hop_length <= 0) throw Error("audio_config: hop_length must be > 0");
  if (cfg.n_mels <= 0) throw Error("audio_config: n_mels must be > 0");
  if (!(cfg.window_seconds > 0.0)) {
    throw Error("audio_config: window_seconds must be > 0");
  }
  if (!std::isfinite(cfg.log_floor)) throw Error("audio_config: log_floor must be finite");
  const double nyquist = cfg.sample_rate_hz / 2.0;
  const double f_max = cfg.f_max_hz > 0.0 ? cfg.f_max_hz : nyquist;
  if (cfg.f_min_hz < 0.0 || f_max > nyquist || cfg.f_min_hz >= f_max) {
    throw Error("audio_config: need 0 <= f_min_hz < f_max_hz <= Nyquist");
  }
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::size_t NumFrames(std::size_t num_samples, int hop_length) {
  return 1 + num_samples / static_cast<std::size_t>(hop_length);
}

MelFilterbank::MelFilterbank(int n_fft, int sample_rate_hz, int n_mels,
                             double f_min_hz, double f_max_hz)
    : n_mels_(n_mels), num_bins_(static_cast<std::size_t>(n_fft) / 2 + 1) {
  const double mel_lo = HzToMel(f_min_hz);
  const double mel_hi = HzToMel(f_max_hz);
  std::vector<double> edges_hz(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    edges_hz[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));
  }
  centers_hz_.assign(edges_hz.begin() + 1, edges_hz.end() - 1);
  weights_.assign(static_cast<std::size_t>(n_mels) * num_bins_, 0.0);
  for (int m = 0; m < n_mels; ++m) {
    const double left = edges_hz[m];
    const double center = edges_hz[m + 1];
    const double right = edges_hz[m + 2];
    for (std::size_t k = 0; k < num_bins_; ++k) {
      const double f = static_cast<double>(k) * sample_rate_hz / n_fft;
      const double up = (f - left) / (center - left);
      const double down = (right - f) / (right - center);
      weights_[m * num_bins_ + k] = std::max(0.0, std::min(up, down));
    }
  }
}

void MelFilterbank::Apply(std::span<const double> power,
                          std::span<double> out) const {
  for (int m = 0; m < n_mels_; ++m) {
    const double* w = weights_.data() + static_cast<std::size_t>(m) * num_bins_;
    double acc = 0.0;
    for (std::size_t k = 0; k < num_bins_; ++k) acc += w[k] * power[k];
    out[m] = acc;
  }
}

MelFrontEnd::MelFrontEnd(const AudioConfig& cfg)
    : cfg_((ValidateAudioConfig(cfg), cfg)),
      window_(static_cast<std::size_t>(cfg.n_fft)),
      filterbank_(cfg.n_fft, cfg.sample_rate_hz, cfg.n_mels, cfg.f_min_hz,
                  cfg.f_max_hz > 0.0 ? cfg.f_max_hz : cfg.sample_rate_hz / 2.0),
      fft_(static_cast<std::size_t>(cfg.n_fft)) {
  // Periodic Hann.
  for (int i = 0; i < cfg.n_fft; ++i) {
    window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / cfg.n_fft);
  }
}

MelSpectrogram MelFrontEnd::Power(const AudioClip& clip) const {
  if (clip.sample_rate_hz() != cfg_.sample_rate_hz) {
    throw Error("mel_spectrogram: clip rate " +
                std::to_string(clip.sample_rate_hz()) +
                " Hz does not match configured " +
                std::to_string(cfg_.sample_rate_hz) + " Hz");
  }
  const auto x = clip.samples();
  const auto len = static_cast<std::ptrdiff_t>(x.size());
  const std::size_t n_fft = static_cast<std::size_t>(cfg_.n_fft);
  const auto pad = static_cast<std::ptrdiff_t>(n_fft / 2);
  // Reflection needs at least pad + 1 samples; shorter clips are zero-padded.
  const bool reflect = len > pad + static_cast<std::ptrdiff_t>(n_fft % 2);
  auto sample = [&](std::ptrdiff_t j) -> double {
    if (j >= 0 && j < len) return x[j];
    if (!reflect) return 0.0;
    return j < 0 ? x[-j] : x[2 * (len - 1) - j];
  };

  MelSpectrogram spec;
  spec.num_frames = NumFrames(x.size(), cfg_.hop_length);
  spec.num_mels = static_cast<std::size_t>(cfg_.n_mels);
  spec.frame_rate = static_cast<double>(cfg_.sample_rate_hz) / cfg_.hop_length;
  spec.values.resize(spec.num_frames * spec.num_mels);

  const double floor_power = std::exp(cfg_.log_floor);
  std::vector<double> frame(n_fft);
  std::vector<std::complex<double>> bins(fft_.num_bins());
  std::vector<double> power(fft_.num_bins());
  for (std::size_t t = 0; t < spec.num_frames; ++t) {
    const std::ptrdiff_t start =
        static_cast<std::ptrdiff_t>(t) * cfg_.hop_length - pad;
    for (std::size_t i = 0; i < n_fft; ++i) {
      frame[i] = sample(start + static_cast<std::ptrdiff_t>(i)) * window_[i];
    }
    fft_.Forward(frame, bins);
    for (std::size_t k = 0; k < bins.size(); ++k) power[k] = std::norm(bins[k]);
    auto row = std::span(spec.values).subspan(t * spec.num_mels, spec.num_mels);
    filterbank_.Apply(power, row);
    for (double& v : row) v = std::max(v, floor_power);
  }
  return spec;
}

MelSpectrogram MelFrontEnd::LogMel(const AudioClip& clip) const {
  MelSpectrogram spec = Power(clip);
  const double floor_power = std::exp(cfg_.log_floor);
  for (double& v : spec.values) {
    v = v <= floor_power ? cfg_.log_floor : std::max(std::log(v), cfg_.log_floor);
  }
  return spec;
}

MelSpectrogram ComputeMelSpectrogram(const AudioClip& clip,
                                     const AudioConfig& cfg) {
  return MelFrontEnd(cfg).LogMel(clip);
}

}  // namespace pamkit
