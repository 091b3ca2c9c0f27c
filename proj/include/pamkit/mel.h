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

#ifndef PAMKIT_MEL_H_
#define PAMKIT_MEL_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "pamkit/audio.h"
#include "pamkit/fft.h"

namespace pamkit {

// Front-end settings that must match the exported encoder. The defaults are
// used when a bundle does not override them.
struct AudioConfig {
  int sample_rate_hz = 44100;
  int n_fft = 1024;
  int hop_length = 320;
  int n_mels = 64;
  double window_seconds = 7.0;
  double log_floor = std::log(1e-10);
  double f_min_hz = 0.0;
  double f_max_hz = 0.0;  // 0 means Nyquist

  friend bool operator==(const AudioConfig&, const AudioConfig&) = default;
};

// Throws pamkit::Error on inconsistent settings.
void ValidateAudioConfig(const AudioConfig& cfg);

// T x F matrix, row-major (frame-major).
struct MelSpectrogram {
  std::size_t num_frames = 0;
  std::size_t num_mels = 0;
  double frame_rate = 0.0;
  std::vector<double> values;

  double at(std::size_t frame, std::size_t mel) const {
    return values[frame * num_mels + mel];
  }
};

double HzToMel(double hz);  // HTK: 2595 log10(1 + f/700)
double MelToHz(double mel);

// Frames produced for `num_samples` with center padding: 1 + floor(n / hop).
std::size_t NumFrames(std::size_t num_samples, int hop_length);

// Triangular HTK-scale filters over the rfft bins of an n_fft transform,
// peaking at 1 with no area normalization.
class MelFilterbank {
 public:
  MelFilterbank(int n_fft, int sample_rate_hz, int n_mels, double f_min_hz,
                double f_max_hz);

  int num_mels() const { return n_mels_; }
  double center_hz(int mel) const { return centers_hz_[mel]; }
  double weight(int mel, std::size_t bin) const {
    return weights_[static_cast<std::size_t>(mel) * num_bins_ + bin];
  }
  void Apply(std::span<const double> power, std::span<double> out) const;

 private:
  int n_mels_;
  std::size_t num_bins_;
  std::vector<double> centers_hz_;
  std::vector<double> weights_;
};

// STFT (periodic Hann, reflect-padded by n_fft/2 at both ends) -> power ->
// mel filterbank. Power() stops there, floored at exp(log_floor);
// LogMel() takes the natural log and clamps at log_floor.
class MelFrontEnd {
 public:
  explicit MelFrontEnd(const AudioConfig& cfg);

  const AudioConfig& config() const { return cfg_; }
  MelSpectrogram Power(const AudioClip& clip) const;
  MelSpectrogram LogMel(const AudioClip& clip) const;

 private:
  AudioConfig cfg_;
  std::vector<double> window_;
  MelFilterbank filterbank_;
  RealFft fft_;
};

// One-shot helper; builds a front end per call.
MelSpectrogram ComputeMelSpectrogram(const AudioClip& clip,
                                     const AudioConfig& cfg);

}  // namespace pamkit

#endif  // PAMKIT_MEL_H_
