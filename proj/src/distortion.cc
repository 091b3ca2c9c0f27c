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

#include "pamkit/distortion.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>

#include "pamkit/error.h"
#include "pamkit/fft.h"
#include "pamkit/format.h"
#include "pamkit/rng.h"

namespace pamkit {
namespace {

struct KindEntry {
  DistortionKind kind;
  std::string_view name;
};

constexpr std::array<KindEntry, 7> kKinds = {{
    {DistortionKind::kGaussianNoiseStd, "gaussian_noise_std"},
    {DistortionKind::kGaussianNoiseSnr, "gaussian_noise_snr"},
    {DistortionKind::kTanh, "tanh"},
    {DistortionKind::kMuLaw, "mu_law"},
    {DistortionKind::kReverb, "reverb"},
    {DistortionKind::kLowPass, "low_pass"},
    {DistortionKind::kHighPass, "high_pass"},
}};

// Direct convolution is exact for tiny kernels and cheaper than an FFT.
constexpr std::size_t kDirectConvolutionTaps = 64;

AudioClip ClampedClip(std::span<const double> values, int sample_rate_hz) {
  std::vector<float> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = static_cast<float>(std::clamp(values[i], -1.0, 1.0));
  }
  return AudioClip(std::move(out), sample_rate_hz);
}

double Peak(std::span<const float> x) {
  double peak = 0.0;
  for (float v : x) peak = std::max(peak, static_cast<double>(std::abs(v)));
  return peak;
}

std::vector<double> GaussianVector(std::size_t n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<double> noise(n);
  for (double& v : noise) v = rng.Gaussian();
  return noise;
}

bool IsIntegral(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

std::string_view KindName(DistortionKind kind) {
  for (const auto& entry : kKinds) {
    if (entry.kind == kind) return entry.name;
  }
  throw Error("unknown distortion kind");
}

DistortionKind ParseKind(std::string_view name) {
  for (const auto& entry : kKinds) {
    if (entry.name == name) return entry.kind;
  }
  throw Error("unknown distortion kind '" + std::string(name) + "'");
}

void ValidateSpec(const DistortionSpec& spec) {
  const double s = spec.severity;
  const std::string where = std::string(KindName(spec.kind)) + ": ";
  if (!std::isfinite(s)) throw Error(where + "severity must be finite");
  switch (spec.kind) {
    case DistortionKind::kGaussianNoiseStd:
      if (s < 0.0) throw Error(where + "sigma must be >= 0");
      break;
    case DistortionKind::kGaussianNoiseSnr:
      break;
    case DistortionKind::kTanh:
      if (s <= 0.0) throw Error(where + "gain must be > 0");
      break;
    case DistortionKind::kMuLaw:
      if (!(spec.mu >= 1.0) || !std::isfinite(spec.mu)) {
        throw Error(where + "mu must be >= 1");
      }
      if (!IsIntegral(s) || s < 2 || s > 16) {
        throw Error(where + "bit depth must be an integer in [2, 16]");
      }
      break;
    case DistortionKind::kReverb:
      if (s <= 0.0) throw Error(where + "rt60 must be > 0");
      break;
    case DistortionKind::kLowPass:
    case DistortionKind::kHighPass:
      if (s <= 0.0) throw Error(where + "cutoff must be > 0");
      break;
  }
}

DistortionSpec SpecFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("distortion spec must be a JSON object");
  static const std::set<std::string> kKeys = {"kind", "severity", "mu", "bits",
                                              "seed"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) {
      throw Error("unknown key '" + key + "' in distortion spec");
    }
  }
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw Error("distortion spec needs a string 'kind'");
  }
  DistortionSpec spec;
  spec.kind = ParseKind(j["kind"].get<std::string>());
  const bool has_severity = j.contains("severity");
  const bool has_bits = j.contains("bits");
  if (has_bits && spec.kind != DistortionKind::kMuLaw) {
    throw Error("'bits' only applies to mu_law");
  }
  if (has_severity) {
    if (!j["severity"].is_number()) throw Error("'severity' must be a number");
    spec.severity = j["severity"].get<double>();
  }
  if (has_bits) {
    if (!j["bits"].is_number()) throw Error("'bits' must be a number");
    const double bits = j["bits"].get<double>();
    if (has_severity && bits != spec.severity) {
      throw Error("mu_law 'bits' and 'severity' disagree");
    }
    spec.severity = bits;
  }
  if (!has_severity && !has_bits) throw Error("distortion spec needs 'severity'");
  if (j.contains("mu")) {
    if (!j["mu"].is_number()) throw Error("'mu' must be a number");
    spec.mu = j["mu"].get<double>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) {
      throw Error("'seed' must be a non-negative integer");
    }
    spec.seed = j["seed"].get<std::uint64_t>();
  }
  ValidateSpec(spec);
  return spec;
}

nlohmann::json SpecToJson(const DistortionSpec& spec) {
  nlohmann::json j = {{"kind", std::string(KindName(spec.kind))},
                      {"severity", spec.severity},
                      {"seed", spec.seed}};
  if (spec.kind == DistortionKind::kMuLaw) {
    j["mu"] = spec.mu;
    j["bits"] = static_cast<int>(spec.severity);
  }
  return j;
}

AudioClip GaussianNoiseStd(const AudioClip& clip, double sigma,
                           std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw Error("gaussian_noise_std: sigma must be >= 0");
  const auto x = clip.samples();
  const auto noise = GaussianVector(x.size(), seed);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + sigma * noise[i];
  return ClampedClip(y, clip.sample_rate_hz());
}

std::vector<double> SnrScaledNoise(const AudioClip& clip, double snr_db,
                                   std::uint64_t seed) {
  if (!std::isfinite(snr_db)) throw Error("gaussian_noise_snr: SNR must be finite");
  const auto x = clip.samples();
  double signal_power = 0.0;
  for (float v : x) signal_power += static_cast<double>(v) * v;
  signal_power /= static_cast<double>(x.size());
  if (signal_power == 0.0) throw Error("undefined SNR for silent signal");

  auto noise = GaussianVector(x.size(), seed);
  double noise_power = 0.0;
  for (double v : noise) noise_power += v * v;
  noise_power /= static_cast<double>(noise.size());
  // A one-sample clip can draw exactly zero noise; nothing to scale then.
  if (noise_power == 0.0) throw Error("gaussian_noise_snr: degenerate noise draw");

  const double target = signal_power / std::pow(10.0, snr_db / 10.0);
  const double gain = std::sqrt(target / noise_power);
  for (double& v : noise) v *= gain;
  return noise;
}

AudioClip GaussianNoiseSnr(const AudioClip& clip, double snr_db,
                           std::uint64_t seed) {
  const auto noise = SnrScaledNoise(clip, snr_db, seed);
  const auto x = clip.samples();
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + noise[i];
  return ClampedClip(y, clip.sample_rate_hz());
}

AudioClip TanhDistortion(const AudioClip& clip, double gain) {
  if (!(gain > 0.0)) throw Error("tanh: gain must be > 0");
  const double norm = std::tanh(gain);
  const auto x = clip.samples();
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(gain * x[i]) / norm;
  return ClampedClip(y, clip.sample_rate_hz());
}

double MuLawCompress(double x, double mu) {
  x = std::clamp(x, -1.0, 1.0);
  return std::copysign(std::log1p(mu * std::abs(x)) / std::log1p(mu), x);
}

double MuLawExpand(double y, double mu) {
  y = std::clamp(y, -1.0, 1.0);
  return std::copysign(std::expm1(std::abs(y) * std::log1p(mu)) / mu, y);
}

double QuantizeUniform(double y, int bits) {
  if (bits < 2 || bits > 16) throw Error("bit depth must be in [2, 16]");
  const double scale = std::ldexp(1.0, bits - 1);
  const double code = std::clamp(std::round(y * scale), -scale, scale - 1.0);
  return code / scale;
}

AudioClip MuLaw(const AudioClip& clip, double mu, int bits) {
  ValidateSpec({DistortionKind::kMuLaw, static_cast<double>(bits), mu, 0});
  const auto x = clip.samples();
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = MuLawExpand(QuantizeUniform(MuLawCompress(x[i], mu), bits), mu);
  }
  return ClampedClip(y, clip.sample_rate_hz());
}

AudioClip SyntheticImpulseResponse(double rt60_seconds, int sample_rate_hz,
                                   std::uint64_t seed) {
  if (!(rt60_seconds > 0.0)) throw Error("reverb: rt60 must be > 0");
  const double decay_samples = rt60_seconds * sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::ceil(decay_samples)) + 1;
  auto ir = GaussianVector(n, seed);
  for (std::size_t i = 0; i < n; ++i) {
    ir[i] *= std::pow(10.0, -3.0 * static_cast<double>(i) / decay_samples);
  }
  // Keep the response representable as a clip: scale to unit peak.
  double peak = 0.0;
  for (double v : ir) peak = std::max(peak, std::abs(v));
  for (double& v : ir) v /= peak;
  return AudioClip::FromDoubles(ir, sample_rate_hz);
}

AudioClip ReverbWithIr(const AudioClip& clip, const AudioClip& ir) {
  if (ir.sample_rate_hz() != clip.sample_rate_hz()) {
    throw Error("reverb: impulse response rate " +
                std::to_string(ir.sample_rate_hz()) +
                " Hz does not match clip rate " +
                std::to_string(clip.sample_rate_hz()) + " Hz");
  }
  const auto x = clip.samples();
  const auto h = ir.samples();
  std::vector<double> y(x.size(), 0.0);
  if (h.size() <= kDirectConvolutionTaps) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::size_t kmax = std::min(h.size() - 1, i);
      double acc = 0.0;
      for (std::size_t k = 0; k <= kmax; ++k) acc += static_cast<double>(h[k]) * x[i - k];
      y[i] = acc;
    }
  } else {
    std::vector<double> xd(x.begin(), x.end());
    std::vector<double> hd(h.begin(), h.end());
    auto full = FftConvolve(xd, hd);
    std::copy_n(full.begin(), y.size(), y.begin());
  }
  double out_peak = 0.0;
  for (double v : y) out_peak = std::max(out_peak, std::abs(v));
  const double in_peak = Peak(x);
  if (out_peak > 0.0) {
    const double gain = in_peak / out_peak;
    for (double& v : y) v *= gain;
  }
  return ClampedClip(y, clip.sample_rate_hz());
}

AudioClip Reverb(const AudioClip& clip, double rt60_seconds,
                 std::uint64_t seed) {
  return ReverbWithIr(
      clip, SyntheticImpulseResponse(rt60_seconds, clip.sample_rate_hz(), seed));
}

AudioClip BiquadFilter(const AudioClip& clip, FilterKind kind,
                       double cutoff_hz) {
  const double nyquist = clip.sample_rate_hz() / 2.0;
  if (!(cutoff_hz > 0.0 && cutoff_hz < nyquist)) {
    throw Error("cutoff " + FormatDouble(cutoff_hz) +
                " Hz out of range (0, " + FormatDouble(nyquist) + ")");
  }
  const double w0 = 2.0 * std::numbers::pi * cutoff_hz / clip.sample_rate_hz();
  const double cos_w0 = std::cos(w0);
  const double alpha = std::sin(w0) / std::numbers::sqrt2;  // sin(w0) / 2Q
  double b0, b1, b2;
  if (kind == FilterKind::kLowPass) {
    b0 = (1.0 - cos_w0) / 2.0;
    b1 = 1.0 - cos_w0;
  } else {
    b0 = (1.0 + cos_w0) / 2.0;
    b1 = -(1.0 + cos_w0);
  }
  b2 = b0;
  const double a0 = 1.0 + alpha;
  const double a1 = -2.0 * cos_w0 / a0;
  const double a2 = (1.0 - alpha) / a0;
  b0 /= a0;
  b1 /= a0;
  b2 /= a0;

  // Transposed direct form II.
  const auto x = clip.samples();
  std::vector<double> y(x.size());
  double z1 = 0.0, z2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double in = x[i];
    const double out = b0 * in + z1;
    z1 = b1 * in - a1 * out + z2;
    z2 = b2 * in - a2 * out;
    y[i] = out;
  }
  return ClampedClip(y, clip.sample_rate_hz());
}

AudioClip ApplyDistortion(const AudioClip& clip, const DistortionSpec& spec) {
  ValidateSpec(spec);
  switch (spec.kind) {
    case DistortionKind::kGaussianNoiseStd:
      return GaussianNoiseStd(clip, spec.severity, spec.seed);
    case DistortionKind::kGaussianNoiseSnr:
      return GaussianNoiseSnr(clip, spec.severity, spec.seed);
    case DistortionKind::kTanh:
      return TanhDistortion(clip, spec.severity);
    case DistortionKind::kMuLaw:
      return MuLaw(clip, spec.mu, static_cast<int>(spec.severity));
    case DistortionKind::kReverb:
      return Reverb(clip, spec.severity, spec.seed);
    case DistortionKind::kLowPass:
      return BiquadFilter(clip, FilterKind::kLowPass, spec.severity);
    case DistortionKind::kHighPass:
      return BiquadFilter(clip, FilterKind::kHighPass, spec.severity);
  }
  throw Error("unknown distortion kind");
}

std::vector<std::pair<double, AudioClip>> Sweep(
    const AudioClip& clip, DistortionKind kind,
    std::span<const double> severities, double mu, std::uint64_t base_seed) {
  if (severities.size() >= 2) {
    const bool up = severities[1] > severities[0];
    for (std::size_t i = 1; i < severities.size(); ++i) {
      const bool ok = up ? severities[i] > severities[i - 1]
                         : severities[i] < severities[i - 1];
      if (!ok) throw Error("sweep severities must be strictly monotone");
    }
  }
  std::vector<DistortionSpec> specs;
  for (std::size_t i = 0; i < severities.size(); ++i) {
    specs.push_back({kind, severities[i], mu, base_seed + i});
    ValidateSpec(specs.back());
  }
  std::vector<std::pair<double, AudioClip>> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    out.emplace_back(spec.severity, ApplyDistortion(clip, spec));
  }
  return out;
}

std::vector<double> DefaultSeverities(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::kGaussianNoiseStd:
      return {0.0, 0.01, 0.02, 0.05, 0.1, 0.2};
    case DistortionKind::kGaussianNoiseSnr:
      return {40, 30, 20, 10, 5, 0};
    case DistortionKind::kTanh:
      return {0.5, 1, 2, 5, 10, 20};
    case DistortionKind::kMuLaw:
      return {16, 8, 6, 4, 3, 2};
    case DistortionKind::kReverb:
      return {0.1, 0.3, 0.5, 1, 2};
    case DistortionKind::kLowPass:
      return {8000, 4000, 2000, 1000, 500};
    case DistortionKind::kHighPass:
      return {100, 300, 1000, 2000, 4000};
  }
  return {};
}

}  // namespace pamkit
