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

#include <bit>
#include <cmath>
#include <filesystem>

#include "pamkit/backend.h"
#include "pamkit/error.h"
#include "test_support.h"

namespace pamkit {
namespace {

using testing::FixtureDir;
using testing::MakeBundle;
using testing::SmallAudioConfig;
using testing::SpeechShaped;
using testing::TempDir;

AudioClip Scaled(const AudioClip& clip, float c) {
  std::vector<float> x(clip.samples().begin(), clip.samples().end());
  for (float& v : x) v *= c;
  return AudioClip(std::move(x), clip.sample_rate_hz());
}

TEST(MockBackendTest, DeterministicUnitNormOutput) {
  const MockBackend a(SmallAudioConfig(), 32, 7);
  const MockBackend b(SmallAudioConfig(), 32, 7);
  const auto clip = SpeechShaped(16000, 1.0, 1);
  const auto va = a.Embed(clip);
  EXPECT_EQ(va, b.Embed(clip));
  EXPECT_EQ(va.dim(), 32u);
  EXPECT_NEAR(va.Norm(), 1.0, 1e-6);
  EXPECT_NE(va, MockBackend(SmallAudioConfig(), 32, 8).Embed(clip));
}

TEST(MockBackendTest, ScaleInvariant) {
  const MockBackend backend(SmallAudioConfig(), 48, 3);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto clip = SpeechShaped(16000, 1.0, seed);
    const auto base = backend.Embed(clip);
    for (float c : {0.1f, 0.5f, 2.0f}) {
      const auto v = backend.Embed(Scaled(clip, c));
      for (std::size_t i = 0; i < v.dim(); ++i) {
        EXPECT_NEAR(v.values()[i], base.values()[i], 1e-6) << c;
      }
    }
  }
}

TEST(MockBackendTest, MatchesExplicitLinearMap) {
  const AudioConfig cfg = SmallAudioConfig();
  const MockBackend backend(cfg, 6, 11);
  const auto clip = SpeechShaped(16000, 1.0, 4);
  const auto power = MelFrontEnd(cfg).Power(clip).values;
  ASSERT_EQ(power.size(), backend.input_size());
  std::vector<double> raw(6, 0.0);
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < power.size(); ++c) {
      raw[r] += static_cast<double>(MockBackend::Weight(11, r, c, power.size())) * power[c];
    }
  }
  double norm = 0.0;
  for (double v : raw) norm += v * v;
  norm = std::sqrt(norm);
  const auto v = backend.Embed(clip);
  for (std::size_t r = 0; r < 6; ++r) EXPECT_NEAR(v.values()[r], raw[r] / norm, 1e-6);
}

TEST(MockBackendTest, WeightsAreUniformInUnitInterval) {
  double sum = 0.0;
  for (std::size_t c = 0; c < 10000; ++c) {
    const float w = MockBackend::Weight(1, 0, c, 10000);
    ASSERT_GE(w, -1.0f);
    ASSERT_LT(w, 1.0f);
    sum += w;
  }
  EXPECT_NEAR(sum / 10000, 0.0, 0.03);
}

TEST(BackendTest, EmbedChecksWindowShape) {
  const MockBackend backend(SmallAudioConfig(), 8, 0);
  EXPECT_THROW(backend.Embed(SpeechShaped(16000, 0.5, 1)), Error);
  EXPECT_THROW(backend.Embed(SpeechShaped(8000, 1.0, 1)), Error);
}

std::uint64_t Fnv1a(const AudioClip& clip) {
  std::uint64_t h = 14695981039346656037ULL;
  auto byte = [&](std::uint8_t b) {
    h ^= b;
    h *= 1099511628211ULL;
  };
  for (float s : clip.samples()) {
    const auto u = std::bit_cast<std::uint32_t>(s);
    for (int i = 0; i < 4; ++i) byte(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  const auto rate = static_cast<std::uint32_t>(clip.sample_rate_hz());
  for (int i = 0; i < 4; ++i) byte(static_cast<std::uint8_t>(rate >> (8 * i)));
  return h;
}

TEST(PrecomputedBackendTest, ContentKeyIsFnv1a) {
  const AudioClip clip({0.25f, -0.5f, 1.0f}, 16000);
  EXPECT_EQ(ContentHash(clip), Fnv1a(clip));
  EXPECT_EQ(ContentKey(clip).size(), 16u);
  EXPECT_EQ(OriginKey({"a.wav", 3}), "a.wav#3");
}

TEST(PrecomputedBackendTest, ReturnsStoredVectorsVerbatim) {
  const AudioConfig cfg = SmallAudioConfig();
  Xoshiro256 rng(2);
  const auto clip_a = SpeechShaped(16000, 1.0, 1);
  const auto clip_b = SpeechShaped(16000, 1.0, 2);
  const auto va = testing::RandomUnit(rng, 8);
  const auto vb = testing::RandomUnit(rng, 8);
  TempDir dir;
  SavePrecomputedStore(dir / "store.json", 8,
                       {{ContentKey(clip_a), va}, {OriginKey({"b.wav", 0}), vb}});
  const auto backend = PrecomputedBackend::FromFile(cfg, dir / "store.json");
  EXPECT_EQ(backend.size(), 2u);
  EXPECT_EQ(backend.Embed(clip_a), va);
  EXPECT_EQ(backend.Embed(clip_b, {"b.wav", 0}), vb);
  EXPECT_THROW(backend.Embed(clip_b), Error);
  EXPECT_THROW(backend.Embed(clip_b, {"b.wav", 1}), Error);
}

TEST(PrecomputedBackendTest, RejectsBadStores) {
  TempDir dir;
  testing::WriteText(dir / "v2.json", R"({"format_version": 2, "dim": 2, "entries": {}})");
  EXPECT_THROW(PrecomputedBackend::FromFile(SmallAudioConfig(), dir / "v2.json"), Error);
  testing::WriteText(dir / "dim.json",
                     R"({"format_version": 1, "dim": 2, "entries": {"k": [1, 0, 0]}})");
  EXPECT_THROW(PrecomputedBackend::FromFile(SmallAudioConfig(), dir / "dim.json"), Error);
  testing::WriteText(dir / "norm.json",
                     R"({"format_version": 1, "dim": 2, "entries": {"k": [0.5, 0.5]}})");
  EXPECT_THROW(PrecomputedBackend::FromFile(SmallAudioConfig(), dir / "norm.json"), Error);
}

TEST(BackendFactoryTest, KindsAndErrors) {
  EXPECT_EQ(ParseBackendKind("mock"), BackendKind::kMock);
  EXPECT_EQ(ParseBackendKind("precomputed"), BackendKind::kPrecomputed);
  EXPECT_EQ(ParseBackendKind("neural"), BackendKind::kNeural);
  EXPECT_THROW(ParseBackendKind("gpu"), Error);
  const auto bundle = MakeBundle(8, 1, SmallAudioConfig());
  EXPECT_EQ(MakeBackend(bundle, {BackendKind::kMock, 3, {}})->name(), "mock");
  EXPECT_THROW(MakeBackend(bundle, {BackendKind::kPrecomputed, 0, {}}), Error);
  EXPECT_THROW(MakeBackend(bundle, {BackendKind::kNeural, 0, {}}), Error);  // no encoder
}

#ifdef PAMKIT_WITH_NEURAL

AudioConfig TinyEncoderConfig() {
  AudioConfig cfg;
  cfg.sample_rate_hz = 8000;
  cfg.n_fft = 256;
  cfg.hop_length = 200;
  cfg.n_mels = 16;
  cfg.window_seconds = 0.5;
  return cfg;
}

TEST(NeuralBackendTest, RunsTheBundledOnnxEncoder) {
  auto bundle = MakeBundle(8, 5, TinyEncoderConfig());
  bundle.encoder_model = "tiny_encoder.onnx";
  bundle.root = FixtureDir();
  TempDir dir;
  SaveBundle(bundle, dir.path());
  const auto loaded = LoadBundle(dir.path());
  const auto backend = MakeBackend(loaded, {BackendKind::kNeural, 0, {}});
  EXPECT_EQ(backend->name(), "neural");

  // The fixture computes Flatten then MatMul with W(i, j) = sin(0.5 i + 1.3 j) / 16.
  const auto clip = SpeechShaped(8000, 0.5, 6);
  const auto mel = MelFrontEnd(TinyEncoderConfig()).LogMel(clip);
  ASSERT_EQ(mel.values.size(), 21u * 16u);
  std::vector<double> raw(8, 0.0);
  for (std::size_t i = 0; i < mel.values.size(); ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      const float w = static_cast<float>(std::sin(0.5 * i + 1.3 * j) / 16.0);
      raw[j] += static_cast<double>(w) * static_cast<float>(mel.values[i]);
    }
  }
  const auto expected = EmbeddingVector::Normalized(std::span<const double>(raw));
  const auto v = backend->Embed(clip);
  EXPECT_NEAR(v.Norm(), 1.0, 1e-6);
  for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(v.values()[j], expected.values()[j], 1e-5);
  EXPECT_EQ(backend->Embed(clip), v);
}

TEST(NeuralBackendTest, OutputDimensionMismatchIsAnError) {
  auto bundle = MakeBundle(12, 5, TinyEncoderConfig());
  bundle.encoder_model = "tiny_encoder.onnx";
  bundle.root = FixtureDir();
  const auto backend = MakeNeuralBackend(bundle);
  EXPECT_THROW(backend->Embed(SpeechShaped(8000, 0.5, 6)), Error);
}

#endif

}  // namespace
}  // namespace pamkit
