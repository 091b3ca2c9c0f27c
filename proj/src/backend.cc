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

#include "pamkit/backend.h"

#include <bit>
#include <fstream>
#include <iterator>

#include "json.hpp"
#include "pamkit/error.h"
#include "pamkit/format.h"
#include "pamkit/rng.h"

namespace pamkit {
namespace {

// Largest projection matrix kept in memory (entries); above this the mock
// regenerates weights on every call.
constexpr std::size_t kMaxCachedWeights = std::size_t{1} << 23;

}  // namespace

EmbeddingBackend::EmbeddingBackend(const AudioConfig& cfg, std::size_t dim)
    : audio_config_(cfg), dim_(dim) {
  ValidateAudioConfig(cfg);
  if (dim == 0) throw Error("embedding dimension must be positive");
}

EmbeddingVector EmbeddingBackend::Embed(const AudioClip& window,
                                        const WindowOrigin& origin) const {
  if (window.sample_rate_hz() != audio_config_.sample_rate_hz) {
    throw Error("embed_audio: window rate " +
                std::to_string(window.sample_rate_hz()) +
                " Hz does not match backend rate " +
                std::to_string(audio_config_.sample_rate_hz) + " Hz");
  }
  const std::size_t expected =
      SecondsToSamples(audio_config_.window_seconds, audio_config_.sample_rate_hz);
  if (window.size() != expected) {
    throw Error("embed_audio: window has " + std::to_string(window.size()) +
                " samples, expected " + std::to_string(expected));
  }
  EmbeddingVector v = EmbedWindow(window, origin);
  if (v.dim() != dim_) {
    throw Error("embed_audio: backend produced dimension " +
                std::to_string(v.dim()) + ", bundle declares " +
                std::to_string(dim_));
  }
  return v;
}

MockBackend::MockBackend(const AudioConfig& cfg, std::size_t dim,
                         std::uint64_t seed)
    : EmbeddingBackend(cfg, dim), front_end_(cfg), seed_(seed) {
  const std::size_t samples = SecondsToSamples(cfg.window_seconds, cfg.sample_rate_hz);
  input_size_ = NumFrames(samples, cfg.hop_length) * static_cast<std::size_t>(cfg.n_mels);
  if (dim * input_size_ <= kMaxCachedWeights) {
    weights_.resize(dim * input_size_);
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < input_size_; ++c) {
        weights_[r * input_size_ + c] = Weight(seed_, r, c, input_size_);
      }
    }
  }
}

float MockBackend::Weight(std::uint64_t seed, std::size_t row, std::size_t col,
                          std::size_t cols) {
  const std::uint64_t key = static_cast<std::uint64_t>(row) * cols + col;
  const std::uint64_t h = HashU64(HashU64(seed) + key);
  const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;
  return static_cast<float>(2.0 * unit - 1.0);
}

EmbeddingVector MockBackend::EmbedWindow(const AudioClip& window,
                                         const WindowOrigin&) const {
  const MelSpectrogram mel = front_end_.Power(window);
  const auto& x = mel.values;
  std::vector<double> raw(dim(), 0.0);
  for (std::size_t r = 0; r < dim(); ++r) {
    double acc = 0.0;
    if (!weights_.empty()) {
      const float* w = weights_.data() + r * input_size_;
      for (std::size_t c = 0; c < input_size_; ++c) acc += w[c] * x[c];
    } else {
      for (std::size_t c = 0; c < input_size_; ++c) {
        acc += Weight(seed_, r, c, input_size_) * x[c];
      }
    }
    raw[r] = acc;
  }
  return EmbeddingVector::Normalized(std::span<const double>(raw));
}

std::uint64_t ContentHash(const AudioClip& clip) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint32_t word) {
    for (int b = 0; b < 4; ++b) {
      h ^= (word >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  for (float s : clip.samples()) mix(std::bit_cast<std::uint32_t>(s));
  mix(static_cast<std::uint32_t>(clip.sample_rate_hz()));
  return h;
}

std::string ContentKey(const AudioClip& clip) { return HexU64(ContentHash(clip)); }

std::string OriginKey(const WindowOrigin& origin) {
  return origin.source + "#" + std::to_string(origin.window_index);
}

PrecomputedBackend::PrecomputedBackend(
    const AudioConfig& cfg, std::size_t dim,
    std::map<std::string, EmbeddingVector> entries)
    : EmbeddingBackend(cfg, dim), entries_(std::move(entries)) {
  for (const auto& [key, v] : entries_) {
    if (v.dim() != dim) {
      throw Error("precomputed entry '" + key + "' has dimension " +
                  std::to_string(v.dim()) + ", expected " + std::to_string(dim));
    }
  }
}

PrecomputedBackend PrecomputedBackend::FromFile(const AudioConfig& cfg,
                                                const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open precomputed store " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": invalid JSON: " + e.what());
  }
  if (j.value("format_version", 0) != 1) {
    throw Error(path.string() + ": unsupported precomputed store version");
  }
  const auto dim = j.value("dim", std::size_t{0});
  std::map<std::string, EmbeddingVector> entries;
  for (const auto& [key, values] : j.at("entries").items()) {
    std::vector<float> row;
    for (const auto& v : values) row.push_back(static_cast<float>(v.get<double>()));
    try {
      entries.emplace(key, EmbeddingVector::FromUnitValues(std::move(row)));
    } catch (const Error& e) {
      throw Error(path.string() + ": entry '" + key + "': " + e.what());
    }
  }
  return PrecomputedBackend(cfg, dim, std::move(entries));
}

EmbeddingVector PrecomputedBackend::EmbedWindow(const AudioClip& window,
                                                const WindowOrigin& origin) const {
  const std::string content = ContentKey(window);
  if (auto it = entries_.find(content); it != entries_.end()) return it->second;
  if (!origin.source.empty()) {
    if (auto it = entries_.find(OriginKey(origin)); it != entries_.end()) {
      return it->second;
    }
  }
  throw Error("no precomputed embedding for window " + content +
              (origin.source.empty() ? "" : " (" + OriginKey(origin) + ")"));
}

void SavePrecomputedStore(const std::filesystem::path& path, std::size_t dim,
                          const std::map<std::string, EmbeddingVector>& entries) {
  nlohmann::json j = {{"format_version", 1}, {"dim", dim}};
  nlohmann::json table = nlohmann::json::object();
  for (const auto& [key, v] : entries) {
    nlohmann::json row = nlohmann::json::array();
    for (float x : v.values()) row.push_back(static_cast<double>(x));
    table[key] = std::move(row);
  }
  j["entries"] = std::move(table);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump() << "\n";
}

#ifndef PAMKIT_WITH_NEURAL
std::unique_ptr<EmbeddingBackend> MakeNeuralBackend(const PromptBundle&) {
  throw Error("pamkit was built without the neural backend (OpenCV dnn)");
}
bool NeuralBackendAvailable() { return false; }
#endif

BackendKind ParseBackendKind(std::string_view name) {
  if (name == "neural") return BackendKind::kNeural;
  if (name == "precomputed") return BackendKind::kPrecomputed;
  if (name == "mock") return BackendKind::kMock;
  throw Error("unknown backend '" + std::string(name) +
              "' (expected neural, precomputed or mock)");
}

std::string_view BackendKindName(BackendKind kind) {
  switch (kind) {
    case BackendKind::kNeural: return "neural";
    case BackendKind::kPrecomputed: return "precomputed";
    case BackendKind::kMock: return "mock";
  }
  return "unknown";
}

std::unique_ptr<EmbeddingBackend> MakeBackend(const PromptBundle& bundle,
                                              const BackendOptions& options) {
  switch (options.kind) {
    case BackendKind::kNeural:
      return MakeNeuralBackend(bundle);
    case BackendKind::kPrecomputed: {
      if (options.precomputed_store.empty()) {
        throw Error("precomputed backend needs a store file");
      }
      auto backend = PrecomputedBackend::FromFile(bundle.audio_config,
                                                  options.precomputed_store);
      if (backend.dim() != bundle.dim) {
        throw Error("precomputed store dimension does not match bundle dim");
      }
      return std::make_unique<PrecomputedBackend>(std::move(backend));
    }
    case BackendKind::kMock:
      return std::make_unique<MockBackend>(bundle.audio_config, bundle.dim,
                                           options.seed);
  }
  throw Error("unknown backend kind");
}

}  // namespace pamkit
