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

#ifndef PAMKIT_DISTORTION_H_
#define PAMKIT_DISTORTION_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pamkit/audio.h"
#include "json.hpp"

namespace pamkit {

enum class DistortionKind {
  kGaussianNoiseStd,
  kGaussianNoiseSnr,
  kTanh,
  kMuLaw,
  kReverb,
  kLowPass,
  kHighPass,
};

std::string_view KindName(DistortionKind kind);
DistortionKind ParseKind(std::string_view name);

// One distortion at one severity. The meaning of `severity` depends on kind:
//   gaussian_noise_std  sigma (>= 0)
//   gaussian_noise_snr  SNR in dB
//   tanh                gain (> 0)
//   mu_law              bit depth in [2, 16]; `mu` holds the compander mu
//   reverb              RT60 in seconds (> 0)
//   low_pass/high_pass  cutoff in Hz, checked against Nyquist when applied
struct DistortionSpec {
  DistortionKind kind = DistortionKind::kGaussianNoiseStd;
  double severity = 0.0;
  double mu = 255.0;
  std::uint64_t seed = 0;

  friend bool operator==(const DistortionSpec&, const DistortionSpec&) = default;
};

// Throws pamkit::Error when the severity or mu is outside the valid domain.
void ValidateSpec(const DistortionSpec& spec);

// {"kind": "...", "severity": ..., "mu": 255, "bits": 8, "seed": 0}.
// For mu_law, "bits" may stand in for "severity".
DistortionSpec SpecFromJson(const nlohmann::json& j);
nlohmann::json SpecToJson(const DistortionSpec& spec);

AudioClip GaussianNoiseStd(const AudioClip& clip, double sigma,
                           std::uint64_t seed);

// The additive noise used by GaussianNoiseSnr before clipping: white
// Gaussian noise rescaled so its mean square over the clip is exactly
// P_signal / 10^(snr_db / 10).
std::vector<double> SnrScaledNoise(const AudioClip& clip, double snr_db,
                                   std::uint64_t seed);
AudioClip GaussianNoiseSnr(const AudioClip& clip, double snr_db,
                           std::uint64_t seed);

// y = tanh(gain * x) / tanh(gain).
AudioClip TanhDistortion(const AudioClip& clip, double gain);

double MuLawCompress(double x, double mu);
double MuLawExpand(double y, double mu);
// Uniform mid-tread quantizer on [-1, 1] with 2^bits levels: codes
// k in [-2^(bits-1), 2^(bits-1) - 1], value k / 2^(bits-1).
double QuantizeUniform(double y, int bits);
// Compand, quantize, expand.
AudioClip MuLaw(const AudioClip& clip, double mu, int bits);

// White noise under an exponential envelope that falls 60 dB at rt60; the
// response is rt60 long plus one sample.
AudioClip SyntheticImpulseResponse(double rt60_seconds, int sample_rate_hz,
                                   std::uint64_t seed);
// Convolves with `ir`, truncates to the input length, and rescales the
// result to the input's peak level.
AudioClip ReverbWithIr(const AudioClip& clip, const AudioClip& ir);
AudioClip Reverb(const AudioClip& clip, double rt60_seconds,
                 std::uint64_t seed);

enum class FilterKind { kLowPass, kHighPass };

// Second-order Butterworth section (bilinear transform, prewarped), applied
// once. Q = 1/sqrt(2) puts the -3 dB point at the cutoff.
AudioClip BiquadFilter(const AudioClip& clip, FilterKind kind,
                       double cutoff_hz);

AudioClip ApplyDistortion(const AudioClip& clip, const DistortionSpec& spec);

// Applies `kind` at each severity. Severities must be strictly monotone
// (either direction); element i uses seed base_seed + i.
std::vector<std::pair<double, AudioClip>> Sweep(
    const AudioClip& clip, DistortionKind kind,
    std::span<const double> severities, double mu, std::uint64_t base_seed);

// Default imperceptible-to-severe ladder per kind.
std::vector<double> DefaultSeverities(DistortionKind kind);

}  // namespace pamkit

#endif  // PAMKIT_DISTORTION_H_
