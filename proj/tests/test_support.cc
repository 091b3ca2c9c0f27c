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

#include "test_support.h"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pamkit::testing {

TempDir::TempDir() {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = base / ("pamkit_test_" + std::to_string(rd()) + std::to_string(rd()));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path FixtureDir() { return PAMKIT_FIXTURE_DIR; }

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::uint8_t> ReadBytes(const std::filesystem::path& path) {
  const std::string s = ReadText(path);
  return {s.begin(), s.end()};
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

AudioClip Sine(double freq_hz, int rate_hz, double seconds, double amplitude,
               double phase) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate_hz));
  std::vector<float> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<float>(
        amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * i / rate_hz + phase));
  }
  return AudioClip(std::move(x), rate_hz);
}

AudioClip SpeechShaped(int rate_hz, double seconds, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate_hz));
  const double f0 = 110.0 + 40.0 * rng.Uniform();
  std::vector<float> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    double v = 0.0;
    for (int h = 1; h <= 6; ++h) {
      v += std::sin(2.0 * std::numbers::pi * f0 * h * t + h) / h;
    }
    const double envelope = 0.55 + 0.45 * std::sin(2.0 * std::numbers::pi * 4.0 * t);
    x[i] = static_cast<float>(0.25 * envelope * v + 0.01 * rng.Gaussian());
  }
  return AudioClip(std::move(x), rate_hz);
}

EmbeddingVector RandomUnit(Xoshiro256& rng, std::size_t dim) {
  std::vector<double> raw(dim);
  for (double& v : raw) v = rng.Gaussian();
  return EmbeddingVector::Normalized(raw);
}

PromptBundle MakeBundle(std::size_t dim, std::uint64_t seed, const AudioConfig& cfg) {
  PromptBundle b;
  b.model_id = "test";
  b.dim = dim;
  b.audio_config = cfg;
  b.prompts = {{"h1", "the sound is clear and clean", PromptRole::kHigh},
               {"b1", "the sound is noisy and with artifacts", PromptRole::kLow},
               {"h2", "the sound quality is good", PromptRole::kHigh},
               {"b2", "the sound quality is bad", PromptRole::kLow}};
  Xoshiro256 rng(seed);
  for (std::size_t i = 0; i < b.prompts.size(); ++i) b.embeddings.push_back(RandomUnit(rng, dim));
  return b;
}

AudioConfig SmallAudioConfig() {
  AudioConfig cfg;
  cfg.sample_rate_hz = 16000;
  cfg.n_fft = 512;
  cfg.hop_length = 160;
  cfg.n_mels = 32;
  cfg.window_seconds = 1.0;
  return cfg;
}

}  // namespace pamkit::testing
