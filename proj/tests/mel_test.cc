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

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "pamkit/error.h"
#include "pamkit/mel.h"
#include "test_support.h"

namespace pamkit {
namespace {

using testing::Sine;

TEST(MelTest, FrameCountFormula) {
  AudioConfig cfg;
  const auto clip = Sine(440, 44100, 1.0);
  const auto mel = ComputeMelSpectrogram(clip, cfg);
  EXPECT_EQ(mel.num_frames, 138u);
  EXPECT_EQ(mel.num_mels, 64u);
  EXPECT_EQ(mel.values.size(), 138u * 64u);
  EXPECT_DOUBLE_EQ(mel.frame_rate, 44100.0 / 320.0);
}

TEST(MelTest, FrameCountOverDurationsAndHops) {
  const int sr = 8000;
  for (double seconds : {0.01, 0.1, 0.37, 0.5, 1.0}) {
    for (int hop : {80, 128, 200, 333}) {
      AudioConfig cfg;
      cfg.sample_rate_hz = sr;
      cfg.n_fft = 256;
      cfg.hop_length = hop;
      cfg.n_mels = 20;
      const auto clip = Sine(300, sr, seconds);
      const auto mel = ComputeMelSpectrogram(clip, cfg);
      EXPECT_EQ(mel.num_frames, 1 + clip.size() / hop) << seconds << " " << hop;
    }
  }
}

TEST(MelTest, SilenceHitsTheFloorEverywhere) {
  AudioConfig cfg;
  const AudioClip silence(std::vector<float>(44100 / 2, 0.0f), 44100);
  const auto mel = ComputeMelSpectrogram(silence, cfg);
  for (double v : mel.values) EXPECT_EQ(v, cfg.log_floor);
}

TEST(MelTest, ToneArgmaxIsConstantAndAtTheNearestFilter) {
  AudioConfig cfg;
  const auto mel = ComputeMelSpectrogram(Sine(1000, 44100, 1.0), cfg);
  // Expected filter: triangle weights at the rfft bins, applied to the
  // analytic Hann-window leakage of a tone between bins,
  // |sin(pi d) / (pi d (1 - d^2))|^2 for bin offset d.
  auto mel_of = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto hz_of = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  const double top = mel_of(22050.0);
  const double k0 = 1000.0 * 1024 / 44100.0;
  auto leakage = [](double d) {
    if (std::abs(d) < 1e-12) return 1.0;
    if (std::abs(std::abs(d) - 1.0) < 1e-12) return 0.25;
    const double v = std::sin(std::numbers::pi * d) / (std::numbers::pi * d * (1.0 - d * d));
    return v * v;
  };
  int expected = -1;
  double best = -1.0;
  for (int m = 0; m < 64; ++m) {
    const double l = hz_of(top * m / 65), c = hz_of(top * (m + 1) / 65), r = hz_of(top * (m + 2) / 65);
    double e = 0.0;
    for (int k = 0; k <= 512; ++k) {
      const double f = k * 44100.0 / 1024;
      e += std::max(0.0, std::min((f - l) / (c - l), (r - f) / (r - c))) * leakage(k - k0);
    }
    if (e > best) {
      best = e;
      expected = m;
    }
  }
  // Edge frames see the reflect padding, not a pure tone; check the rest.
  const std::size_t hop = static_cast<std::size_t>(cfg.hop_length);
  const std::size_t half = static_cast<std::size_t>(cfg.n_fft / 2);
  for (std::size_t t = half / hop + 1; t * hop + half <= 44100; ++t) {
    std::size_t arg = 0;
    for (std::size_t f = 1; f < mel.num_mels; ++f) {
      if (mel.at(t, f) > mel.at(t, arg)) arg = f;
    }
    EXPECT_EQ(static_cast<int>(arg), expected) << "frame " << t;
  }
}

TEST(MelTest, FilterbankMatchesHtkCenters) {
  const MelFilterbank fb(1024, 44100, 64, 0.0, 22050.0);
  const double top = HzToMel(22050.0);
  for (int m = 0; m < 64; ++m) {
    EXPECT_NEAR(fb.center_hz(m), MelToHz(top * (m + 1) / 65), 1e-9);
    for (std::size_t k = 0; k < 513; ++k) {
      EXPECT_GE(fb.weight(m, k), 0.0);
      EXPECT_LE(fb.weight(m, k), 1.0);
    }
  }
  EXPECT_NEAR(HzToMel(700.0), 2595.0 * std::log10(2.0), 1e-12);
  EXPECT_NEAR(MelToHz(HzToMel(1234.5)), 1234.5, 1e-9);
}

// Direct DFT with explicit reflect padding, periodic Hann and HTK triangles.
std::vector<double> OracleLogMel(std::span<const float> x, const AudioConfig& cfg) {
  const int n = cfg.n_fft;
  const int pad = n / 2;
  const auto len = static_cast<long>(x.size());
  auto at = [&](long j) -> double {
    if (j < 0) j = -j;
    if (j >= len) j = 2 * (len - 1) - j;
    return x[j];
  };
  const std::size_t frames = 1 + x.size() / cfg.hop_length;
  const double fmax = cfg.sample_rate_hz / 2.0;
  auto mel_of = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto hz_of = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  std::vector<double> out;
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<double> power(n / 2 + 1);
    for (int k = 0; k <= n / 2; ++k) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < n; ++i) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
        acc += w * at(static_cast<long>(t) * cfg.hop_length - pad + i) *
               std::polar(1.0, -2.0 * std::numbers::pi * k * i / n);
      }
      power[k] = std::norm(acc);
    }
    for (int m = 0; m < cfg.n_mels; ++m) {
      const double top = mel_of(fmax);
      const double l = hz_of(top * m / (cfg.n_mels + 1));
      const double c = hz_of(top * (m + 1) / (cfg.n_mels + 1));
      const double r = hz_of(top * (m + 2) / (cfg.n_mels + 1));
      double e = 0.0;
      for (int k = 0; k <= n / 2; ++k) {
        const double f = static_cast<double>(k) * cfg.sample_rate_hz / n;
        e += std::max(0.0, std::min((f - l) / (c - l), (r - f) / (r - c))) * power[k];
      }
      out.push_back(std::max(std::log(std::max(e, 1e-300)), cfg.log_floor));
    }
  }
  return out;
}

TEST(MelTest, MatchesDirectDftOracle) {
  AudioConfig cfg;
  cfg.sample_rate_hz = 8000;
  cfg.n_fft = 64;
  cfg.hop_length = 20;
  cfg.n_mels = 10;
  const auto clip = testing::SpeechShaped(8000, 0.05, 3);
  const auto mel = ComputeMelSpectrogram(clip, cfg);
  const auto oracle = OracleLogMel(clip.samples(), cfg);
  ASSERT_EQ(mel.values.size(), oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) EXPECT_NEAR(mel.values[i], oracle[i], 1e-9) << i;
}

TEST(MelTest, NoiseRaisesMeanEnergy) {
  AudioConfig cfg;
  cfg.sample_rate_hz = 16000;
  cfg.n_fft = 512;
  cfg.hop_length = 160;
  cfg.n_mels = 32;
  const MelFrontEnd fe(cfg);
  const auto clean = testing::SpeechShaped(16000, 0.5, 4);
  Xoshiro256 rng(9);
  std::vector<float> noisy(clean.samples().begin(), clean.samples().end());
  for (float& v : noisy) v += static_cast<float>(0.05 * rng.Gaussian());
  const auto a = fe.Power(clean);
  const auto b = fe.Power(AudioClip(noisy, 16000));
  double ea = 0.0, eb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    ea += a.values[i];
    eb += b.values[i];
  }
  EXPECT_GT(eb, ea);
}

TEST(MelTest, RejectsRateMismatchAndBadConfig) {
  AudioConfig cfg;
  EXPECT_THROW(ComputeMelSpectrogram(Sine(440, 16000, 0.1), cfg), Error);
  AudioConfig bad = cfg;
  bad.n_mels = 0;
  EXPECT_THROW(MelFrontEnd{bad}, Error);
  bad = cfg;
  bad.f_max_hz = 30000;
  EXPECT_THROW(MelFrontEnd{bad}, Error);
}

TEST(MelTest, ShortClipsAreZeroPadded) {
  AudioConfig cfg;
  cfg.sample_rate_hz = 8000;
  cfg.n_fft = 256;
  cfg.hop_length = 64;
  cfg.n_mels = 8;
  const auto mel = ComputeMelSpectrogram(AudioClip({0.5f, -0.5f, 0.25f}, 8000), cfg);
  EXPECT_EQ(mel.num_frames, 1u);
  for (double v : mel.values) EXPECT_TRUE(std::isfinite(v));
}

}  // namespace
}  // namespace pamkit
