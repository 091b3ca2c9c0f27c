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
#include <cstring>
#include <numbers>

#include "pamkit/audio.h"
#include "pamkit/error.h"
#include "test_support.h"

namespace pamkit {
namespace {

using testing::Sine;
using testing::TempDir;

// Hand-rolled RIFF writer, independent of EncodeWav.
struct WavBuilder {
  std::vector<std::uint8_t> bytes;

  void Tag(const char* t) { bytes.insert(bytes.end(), t, t + 4); }
  void U16(std::uint16_t v) {
    bytes.push_back(v & 0xff);
    bytes.push_back(v >> 8);
  }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back((v >> (8 * i)) & 0xff);
  }

  static std::vector<std::uint8_t> Make(std::uint16_t format, std::uint16_t channels,
                                        std::uint32_t rate, std::uint16_t bits,
                                        const std::vector<std::uint8_t>& data,
                                        std::uint32_t declared_size = 0) {
    WavBuilder w;
    const std::uint32_t size = declared_size ? declared_size : data.size();
    w.Tag("RIFF");
    w.U32(36 + data.size());
    w.Tag("WAVE");
    w.Tag("fmt ");
    w.U32(16);
    w.U16(format);
    w.U16(channels);
    w.U32(rate);
    w.U32(rate * channels * bits / 8);
    w.U16(channels * bits / 8);
    w.U16(bits);
    w.Tag("data");
    w.U32(size);
    w.bytes.insert(w.bytes.end(), data.begin(), data.end());
    return w.bytes;
  }
};

std::vector<std::uint8_t> Int16Le(std::initializer_list<int> values) {
  std::vector<std::uint8_t> out;
  for (int v : values) {
    const auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(v));
    out.push_back(u & 0xff);
    out.push_back(u >> 8);
  }
  return out;
}

std::vector<std::uint8_t> Float32Le(std::initializer_list<float> values) {
  std::vector<std::uint8_t> out;
  for (float v : values) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    for (int i = 0; i < 4; ++i) out.push_back((u >> (8 * i)) & 0xff);
  }
  return out;
}

TEST(WavTest, Pcm16FullScaleMapping) {
  const auto clip = DecodeWav(WavBuilder::Make(1, 1, 8000, 16, Int16Le({32767, -32768})));
  ASSERT_EQ(clip.size(), 2u);
  EXPECT_NEAR(clip.samples()[0], 0.99997, 1e-5);
  EXPECT_EQ(clip.samples()[1], -1.0f);
  EXPECT_EQ(clip.sample_rate_hz(), 8000);
}

TEST(WavTest, StereoIsDownmixedByMean) {
  const auto clip = DecodeWav(WavBuilder::Make(3, 2, 16000, 32, Float32Le({0.5f, -0.5f, 0.25f, 0.75f})));
  ASSERT_EQ(clip.size(), 2u);
  EXPECT_EQ(clip.samples()[0], 0.0f);
  EXPECT_EQ(clip.samples()[1], 0.5f);
}

TEST(WavTest, Pcm24And32Scale) {
  // 24-bit: 0x400000 is half scale.
  const std::vector<std::uint8_t> d24 = {0x00, 0x00, 0x40, 0x00, 0x00, 0xC0};
  const auto c24 = DecodeWav(WavBuilder::Make(1, 1, 8000, 24, d24));
  EXPECT_EQ(c24.samples()[0], 0.5f);
  EXPECT_EQ(c24.samples()[1], -0.5f);
  const std::vector<std::uint8_t> d32 = {0x00, 0x00, 0x00, 0x20};
  const auto c32 = DecodeWav(WavBuilder::Make(1, 1, 8000, 32, d32));
  EXPECT_EQ(c32.samples()[0], 0.25f);
}

TEST(WavTest, TruncatedDataChunkIsAnError) {
  auto bytes = WavBuilder::Make(1, 1, 8000, 16, Int16Le({1, 2, 3}), 64);
  try {
    DecodeWav(bytes);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("truncated data chunk"), std::string::npos);
  }
}

TEST(WavTest, UnsupportedCodecAndMalformedHeader) {
  EXPECT_THROW(DecodeWav(WavBuilder::Make(6, 1, 8000, 8, {1, 2})), Error);  // A-law
  EXPECT_THROW(DecodeWav(WavBuilder::Make(1, 1, 8000, 8, {1, 2})), Error);  // 8-bit PCM
  std::vector<std::uint8_t> junk = {'R', 'I', 'F', 'X', 0, 0, 0, 0};
  EXPECT_THROW(DecodeWav(junk), Error);
  EXPECT_THROW(LoadWav("/nonexistent/file.wav"), Error);
}

TEST(WavTest, Float32RoundTripIsExact) {
  TempDir dir;
  const AudioClip clip({0.0f, 0.25f, -0.25f, 1.0f, -1.0f, 1e-7f}, 22050);
  SaveWav(clip, dir / "f.wav", WavEncoding::kFloat32);
  EXPECT_EQ(LoadWav(dir / "f.wav"), clip);
}

TEST(WavTest, Pcm16RoundTripMatchesRoundingOracle) {
  TempDir dir;
  Xoshiro256 rng(5);
  std::vector<float> x(4000);
  for (float& v : x) v = static_cast<float>(2.0 * rng.Uniform() - 1.0);
  x[0] = 1.0f;
  x[1] = -1.0f;
  const AudioClip clip(x, 16000);
  SaveWav(clip, dir / "p.wav", WavEncoding::kPcm16);
  const AudioClip back = LoadWav(dir / "p.wav");
  ASSERT_EQ(back.size(), clip.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double code = std::clamp(std::round(static_cast<double>(x[i]) * 32768.0), -32768.0, 32767.0);
    EXPECT_EQ(back.samples()[i], static_cast<float>(code / 32768.0)) << i;
    EXPECT_LE(std::abs(back.samples()[i] - x[i]), std::ldexp(1.0, -15)) << i;
  }
}

TEST(WavTest, OutOfRangeSampleIsRejected) {
  const AudioClip clip({0.0f, 1.5f}, 8000);
  try {
    EncodeWav(clip, WavEncoding::kPcm16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("sample out of range"), std::string::npos);
  }
  EXPECT_THROW(EncodeWav(clip, WavEncoding::kFloat32), Error);
}

TEST(AudioClipTest, RejectsInvalidData) {
  EXPECT_THROW(AudioClip({}, 8000), Error);
  EXPECT_THROW(AudioClip({0.0f}, 0), Error);
  EXPECT_THROW(AudioClip({std::nanf("")}, 8000), Error);
  EXPECT_THROW(AudioClip({INFINITY}, 8000), Error);
}

// Magnitude of the Hann-windowed DTFT of x at frequency f.
double DtftMagnitude(std::span<const float> x, int rate, double f) {
  std::complex<double> acc = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
    acc += w * x[i] * std::polar(1.0, -2.0 * std::numbers::pi * f * i / rate);
  }
  return std::abs(acc);
}

TEST(ResampleTest, IdentityAtSameRate) {
  const auto clip = Sine(440, 16000, 0.3);
  EXPECT_EQ(Resample(clip, 16000), clip);
}

TEST(ResampleTest, LengthFollowsRateRatio) {
  EXPECT_EQ(Resample(Sine(440, 16000, 1.0), 44100).size(), 44100u);
  EXPECT_EQ(Resample(Sine(440, 44100, 1.0), 16000).size(), 16000u);
  // round(1001 * 3 / 2) = round(1501.5) = 1502
  EXPECT_EQ(Resample(AudioClip(std::vector<float>(1001, 0.1f), 2), 3).size(), 1502u);
  EXPECT_EQ(Resample(AudioClip(std::vector<float>(7, 0.1f), 48000), 16000).size(), 2u);
}

TEST(ResampleTest, SinePeakStaysAt440Hz) {
  const auto out = Resample(Sine(440, 16000, 1.0), 44100);
  double best_f = 0.0;
  double best = -1.0;
  for (double f = 420.0; f <= 460.0; f += 0.1) {
    const double m = DtftMagnitude(out.samples(), 44100, f);
    if (m > best) {
      best = m;
      best_f = f;
    }
  }
  EXPECT_NEAR(best_f, 440.0, 1.0);
  // Amplitude is preserved away from the edges.
  double peak = 0.0;
  for (std::size_t i = 2000; i < out.size() - 2000; ++i) {
    peak = std::max(peak, std::abs(static_cast<double>(out.samples()[i])));
  }
  EXPECT_NEAR(peak, 0.5, 0.01);
}

TEST(ResampleTest, DownsamplingRejectsAliases) {
  // 7 kHz is above the 4 kHz Nyquist of the target.
  const auto out = Resample(Sine(7000, 16000, 1.0), 8000);
  double energy = 0.0;
  for (std::size_t i = 500; i < out.size() - 500; ++i) energy += out.samples()[i] * out.samples()[i];
  const double rms = std::sqrt(energy / (out.size() - 1000));
  EXPECT_LT(20.0 * std::log10(rms / (0.5 / std::sqrt(2.0))), -40.0);
}

TEST(ResampleTest, ResamplingTwiceToSameTargetIsIdempotent) {
  const auto once = Resample(Sine(300, 16000, 0.5), 22050);
  const auto twice = Resample(once, 22050);
  double err = 0.0;
  for (std::size_t i = 0; i < once.size(); ++i) {
    err += std::pow(once.samples()[i] - twice.samples()[i], 2);
  }
  EXPECT_LE(std::sqrt(err / once.size()), 1e-6);
}

// Enumerates window start offsets one hop at a time.
std::vector<std::size_t> EnumerateStarts(std::size_t len, std::size_t win, std::size_t hop) {
  std::vector<std::size_t> starts;
  for (std::size_t s = 0;; s += hop) {
    starts.push_back(s);
    if (s + win >= len) break;
  }
  return starts;
}

TEST(WindowClipTest, MatchesEnumerationOracle) {
  Xoshiro256 rng(11);
  for (std::size_t len : {1u, 5u, 69u, 70u, 71u, 100u, 140u, 141u, 333u}) {
    std::vector<float> x(len);
    for (float& v : x) v = static_cast<float>(rng.Uniform() - 0.5);
    const AudioClip clip(x, 10);
    for (auto [w, h] : {std::pair{7.0, 7.0}, {7.0, 3.0}, {7.0, 0.5}, {2.0, 2.0}}) {
      const std::size_t win = static_cast<std::size_t>(w * 10);
      const std::size_t hop = static_cast<std::size_t>(h * 10);
      const auto windows = WindowClip(clip, w, h);
      const auto starts = EnumerateStarts(len, win, hop);
      ASSERT_EQ(windows.size(), starts.size()) << len << " " << w << " " << h;
      const std::size_t formula =
          len <= win ? 1 : (len - win + hop - 1) / hop + 1;
      EXPECT_EQ(windows.size(), formula);
      for (std::size_t k = 0; k < starts.size(); ++k) {
        ASSERT_EQ(windows[k].size(), win);
        for (std::size_t i = 0; i < win; ++i) {
          const std::size_t src = starts[k] + i;
          EXPECT_EQ(windows[k].samples()[i], src < len ? x[src] : 0.0f);
        }
      }
    }
  }
}

TEST(WindowClipTest, SpecExamples) {
  const int sr = 100;
  auto ten = WindowClip(AudioClip(std::vector<float>(10 * sr, 0.5f), sr), 7.0, 7.0);
  ASSERT_EQ(ten.size(), 2u);
  EXPECT_EQ(ten[1].samples()[3 * sr - 1], 0.5f);
  for (int i = 3 * sr; i < 7 * sr; ++i) EXPECT_EQ(ten[1].samples()[i], 0.0f);

  auto three = WindowClip(AudioClip(std::vector<float>(3 * sr, 0.5f), sr), 7.0, 7.0);
  ASSERT_EQ(three.size(), 1u);
  EXPECT_EQ(three[0].size(), 7u * sr);

  auto seven = WindowClip(AudioClip(std::vector<float>(7 * sr, 0.5f), sr), 7.0, 7.0);
  ASSERT_EQ(seven.size(), 1u);
  EXPECT_EQ(seven[0].samples().back(), 0.5f);
}

TEST(WindowClipTest, ConcatenationReconstructsPaddedInput) {
  const auto clip = Sine(50, 1000, 2.35);
  const auto windows = WindowClip(clip, 0.5, 0.5);
  std::vector<float> joined;
  for (const auto& w : windows) joined.insert(joined.end(), w.samples().begin(), w.samples().end());
  ASSERT_EQ(joined.size(), 2500u);
  for (std::size_t i = 0; i < joined.size(); ++i) {
    EXPECT_EQ(joined[i], i < clip.size() ? clip.samples()[i] : 0.0f);
  }
}

TEST(WindowClipTest, RejectsBadWindowing) {
  const auto clip = Sine(50, 1000, 1.0);
  EXPECT_THROW(WindowClip(clip, 0.5, 0.7), Error);
  EXPECT_THROW(WindowClip(clip, 0.5, 0.0), Error);
  EXPECT_THROW(WindowClip(clip, 0.0, 0.0), Error);
}

}  // namespace
}  // namespace pamkit
