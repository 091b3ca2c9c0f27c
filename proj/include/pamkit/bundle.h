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

#ifndef PAMKIT_BUNDLE_H_
#define PAMKIT_BUNDLE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pamkit/embedding.h"
#include "pamkit/mel.h"

namespace pamkit {

inline constexpr int kBundleFormatVersion = 1;

enum class PromptRole { kHigh, kLow };

std::string_view RoleName(PromptRole role);

struct Prompt {
  std::string id;
  std::string text;
  PromptRole role = PromptRole::kHigh;

  friend bool operator==(const Prompt&, const Prompt&) = default;
};

// Versioned package of prompt texts and their precomputed text embeddings.
//
// On disk (one directory):
//   bundle.json     metadata: format_version, model_id, dim, logit_scale?,
//                   audio_config, encoder_model?, provenance?, checksums
//   prompts.json    [{"id", "text", "role": "high"|"low"}, ...]
//   embeddings.bin  row-major float32 little-endian, one row per prompt
//   <encoder>       optional ONNX audio encoder named by encoder_model
//
// checksums maps each of those file names to its lowercase hex SHA-256.
struct PromptBundle {
  int format_version = kBundleFormatVersion;
  std::string model_id;
  std::size_t dim = 0;
  std::optional<double> logit_scale;
  AudioConfig audio_config;
  std::vector<Prompt> prompts;
  std::vector<EmbeddingVector> embeddings;  // parallel to prompts
  // File name inside the bundle directory.
  std::optional<std::string> encoder_model;
  // Free-form exporter metadata, carried through untouched.
  nlohmann::json provenance;

  // Directory the bundle was loaded from; empty for in-memory bundles.
  std::filesystem::path root;
  // Non-fatal issues noticed while loading (unknown keys, missing checksums).
  std::vector<std::string> warnings;

  // Index of the prompt with `id`, or nullopt.
  std::optional<std::size_t> FindPrompt(std::string_view id) const;
  // Throws "missing prompt id" when absent.
  const Prompt& PromptById(std::string_view id) const;
  const EmbeddingVector& EmbeddingById(std::string_view id) const;
  std::optional<std::filesystem::path> EncoderPath() const;
};

// Checks every invariant of a bundle: unique ids, both roles present,
// one unit-norm row of length dim per prompt, a valid audio config.
void ValidateBundle(const PromptBundle& bundle);

PromptBundle LoadBundle(const std::filesystem::path& dir);

// Writes bundle.json, prompts.json and embeddings.bin (plus a copy of the
// encoder file when the bundle came from another directory) with fresh
// checksums. Output is byte-stable for a given bundle.
void SaveBundle(const PromptBundle& bundle, const std::filesystem::path& dir);

// Serialized pieces, exposed for tests and tooling.
std::vector<std::uint8_t> EncodeEmbeddings(
    std::span<const EmbeddingVector> rows);
std::string Sha256Hex(std::span<const std::uint8_t> bytes);
std::string Sha256HexOfFile(const std::filesystem::path& path);

nlohmann::json AudioConfigToJson(const AudioConfig& cfg);
// Missing keys keep their defaults; unknown keys are appended to `warnings`.
AudioConfig AudioConfigFromJson(const nlohmann::json& j,
                                std::vector<std::string>* warnings);

}  // namespace pamkit

#endif  // PAMKIT_BUNDLE_H_
