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

#ifndef PAMKIT_BACKEND_H_
#define PAMKIT_BACKEND_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pamkit/audio.h"
#include "pamkit/bundle.h"
#include "pamkit/embedding.h"
#include "pamkit/mel.h"

namespace pamkit {

// Where a window came from. Only the precomputed store uses it, as a
// fallback lookup key.
struct WindowOrigin {
  std::string source;
  std::size_t window_index = 0;
};

// Produces unit-norm audio embeddings for fixed-length windows.
// Implementations are immutable after construction and safe to share
// between threads.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  virtual std::string_view name() const = 0;
  std::size_t dim() const { return dim_; }
  const AudioConfig& audio_config() const { return audio_config_; }

  // Checks that `window` has the configured rate and exactly
  // window_seconds of samples, then embeds it.
  EmbeddingVector Embed(const AudioClip& window,
                        const WindowOrigin& origin = {}) const;

 protected:
  EmbeddingBackend(const AudioConfig& cfg, std::size_t dim);
  virtual EmbeddingVector EmbedWindow(const AudioClip& window,
                                      const WindowOrigin& origin) const = 0;

 private:
  AudioConfig audio_config_;
  std::size_t dim_;
};

// Fixed pseudo-random linear map from the flattened (floored) mel power
// spectrogram to `dim` values, then L2 normalization. Because the map is
// linear in power, scaling the input by c > 0 leaves the embedding
// unchanged. Matrix entries are uniform in [-1, 1) and depend only on
// (seed, row, column).
class MockBackend final : public EmbeddingBackend {
 public:
  MockBackend(const AudioConfig& cfg, std::size_t dim, std::uint64_t seed);

  std::string_view name() const override { return "mock"; }
  std::size_t input_size() const { return input_size_; }
  // Entry of the projection matrix; used by tests as an independent route.
  static float Weight(std::uint64_t seed, std::size_t row, std::size_t col,
                      std::size_t cols);

 protected:
  EmbeddingVector EmbedWindow(const AudioClip& window,
                              const WindowOrigin& origin) const override;

 private:
  MelFrontEnd front_end_;
  std::uint64_t seed_;
  std::size_t input_size_;
  std::vector<float> weights_;  // empty when generated on the fly
};

// 64-bit FNV-1a over the float32 little-endian sample bytes followed by the
// sample rate as a 32-bit little-endian integer.
std::uint64_t ContentHash(const AudioClip& clip);
std::string ContentKey(const AudioClip& clip);  // 16 lowercase hex digits
std::string OriginKey(const WindowOrigin& origin);  // "<source>#<index>"

// Replays cached embeddings. Lookup tries the content key first, then the
// origin key. Store file: {"format_version": 1, "dim": d,
// "entries": {"<key>": [floats...], ...}}.
class PrecomputedBackend final : public EmbeddingBackend {
 public:
  PrecomputedBackend(const AudioConfig& cfg, std::size_t dim,
                     std::map<std::string, EmbeddingVector> entries);
  static PrecomputedBackend FromFile(const AudioConfig& cfg,
                                     const std::filesystem::path& path);

  std::string_view name() const override { return "precomputed"; }
  std::size_t size() const { return entries_.size(); }

 protected:
  EmbeddingVector EmbedWindow(const AudioClip& window,
                              const WindowOrigin& origin) const override;

 private:
  std::map<std::string, EmbeddingVector> entries_;
};

void SavePrecomputedStore(const std::filesystem::path& path, std::size_t dim,
                          const std::map<std::string, EmbeddingVector>& entries);

// Runs the bundle's ONNX audio encoder on the log-mel spectrogram, fed as a
// [1, 1, T, F] float tensor; the single output must hold `dim` values.
// Inference calls are serialized internally.
std::unique_ptr<EmbeddingBackend> MakeNeuralBackend(const PromptBundle& bundle);
bool NeuralBackendAvailable();

enum class BackendKind { kNeural, kPrecomputed, kMock };

BackendKind ParseBackendKind(std::string_view name);
std::string_view BackendKindName(BackendKind kind);

struct BackendOptions {
  BackendKind kind = BackendKind::kMock;
  std::uint64_t seed = 0;
  std::filesystem::path precomputed_store;
};

std::unique_ptr<EmbeddingBackend> MakeBackend(const PromptBundle& bundle,
                                              const BackendOptions& options);

}  // namespace pamkit

#endif  // PAMKIT_BACKEND_H_
