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

#include "pamkit/bundle.h"

#include <openssl/evp.h>

#include <bit>
#include <fstream>
#include <iterator>
#include <set>

#include "pamkit/error.h"

namespace pamkit {
namespace fs = std::filesystem;

namespace {

constexpr const char* kBundleJson = "bundle.json";
constexpr const char* kPromptsJson = "prompts.json";
constexpr const char* kEmbeddingsBin = "embeddings.bin";

std::vector<std::uint8_t> ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
}

void WriteBytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<std::uint8_t> ToBytes(const std::string& s) {
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

nlohmann::json ParseJson(std::span<const std::uint8_t> bytes,
                         const std::string& name) {
  try {
    return nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(name + ": invalid JSON: " + e.what());
  }
}

PromptRole ParseRole(const std::string& s) {
  if (s == "high") return PromptRole::kHigh;
  if (s == "low") return PromptRole::kLow;
  throw Error("prompt role must be 'high' or 'low', got '" + s + "'");
}

template <typename T>
T Required(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw Error(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(where + ": '" + key + "' has the wrong type");
  }
}

std::string PromptsJson(const std::vector<Prompt>& prompts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : prompts) {
    arr.push_back({{"id", p.id}, {"text", p.text},
                   {"role", std::string(RoleName(p.role))}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace

std::string_view RoleName(PromptRole role) {
  return role == PromptRole::kHigh ? "high" : "low";
}

std::optional<std::size_t> PromptBundle::FindPrompt(std::string_view id) const {
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    if (prompts[i].id == id) return i;
  }
  return std::nullopt;
}

const Prompt& PromptBundle::PromptById(std::string_view id) const {
  const auto i = FindPrompt(id);
  if (!i) throw Error("missing prompt id '" + std::string(id) + "' in bundle");
  return prompts[*i];
}

const EmbeddingVector& PromptBundle::EmbeddingById(std::string_view id) const {
  const auto i = FindPrompt(id);
  if (!i) throw Error("missing prompt id '" + std::string(id) + "' in bundle");
  return embeddings[*i];
}

std::optional<fs::path> PromptBundle::EncoderPath() const {
  if (!encoder_model) return std::nullopt;
  return root.empty() ? fs::path(*encoder_model) : root / *encoder_model;
}

void ValidateBundle(const PromptBundle& bundle) {
  if (bundle.format_version != kBundleFormatVersion) {
    throw Error("unsupported bundle format version " +
                std::to_string(bundle.format_version) + " (expected " +
                std::to_string(kBundleFormatVersion) + ")");
  }
  if (bundle.dim == 0) throw Error("bundle dim must be positive");
  if (bundle.logit_scale && !(*bundle.logit_scale > 0.0)) {
    throw Error("bundle logit_scale must be positive");
  }
  ValidateAudioConfig(bundle.audio_config);
  std::set<std::string> ids;
  bool has_high = false, has_low = false;
  for (const auto& p : bundle.prompts) {
    if (p.id.empty()) throw Error("prompt ids must be non-empty");
    if (!ids.insert(p.id).second) throw Error("duplicate prompt id '" + p.id + "'");
    (p.role == PromptRole::kHigh ? has_high : has_low) = true;
  }
  if (!has_high || !has_low) throw Error("bundle must contain opposing prompts");
  if (bundle.embeddings.size() != bundle.prompts.size()) {
    throw Error("embedding matrix size mismatch");
  }
  for (std::size_t i = 0; i < bundle.embeddings.size(); ++i) {
    const auto& e = bundle.embeddings[i];
    if (e.dim() != bundle.dim) throw Error("embedding matrix size mismatch");
    if (std::abs(e.Norm() - 1.0) > kUnitNormTolerance) {
      throw Error("prompt embedding '" + bundle.prompts[i].id + "' is not unit-norm");
    }
  }
}

std::vector<std::uint8_t> EncodeEmbeddings(
    std::span<const EmbeddingVector> rows) {
  std::vector<std::uint8_t> out;
  for (const auto& row : rows) {
    for (float v : row.values()) {
      const auto u = std::bit_cast<std::uint32_t>(v);
      for (int b = 0; b < 4; ++b) out.push_back((u >> (8 * b)) & 0xFF);
    }
  }
  return out;
}

std::string Sha256Hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::string Sha256HexOfFile(const fs::path& path) {
  return Sha256Hex(ReadBytes(path));
}

nlohmann::json AudioConfigToJson(const AudioConfig& cfg) {
  return {{"sample_rate_hz", cfg.sample_rate_hz},
          {"n_fft", cfg.n_fft},
          {"hop_length", cfg.hop_length},
          {"n_mels", cfg.n_mels},
          {"window_seconds", cfg.window_seconds},
          {"log_floor", cfg.log_floor},
          {"f_min_hz", cfg.f_min_hz},
          {"f_max_hz", cfg.f_max_hz}};
}

AudioConfig AudioConfigFromJson(const nlohmann::json& j,
                                std::vector<std::string>* warnings) {
  if (!j.is_object()) throw Error("audio_config must be an object");
  AudioConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "sample_rate_hz") cfg.sample_rate_hz = value.get<int>();
      else if (key == "n_fft") cfg.n_fft = value.get<int>();
      else if (key == "hop_length") cfg.hop_length = value.get<int>();
      else if (key == "n_mels") cfg.n_mels = value.get<int>();
      else if (key == "window_seconds") cfg.window_seconds = value.get<double>();
      else if (key == "log_floor") cfg.log_floor = value.get<double>();
      else if (key == "f_min_hz") cfg.f_min_hz = value.get<double>();
      else if (key == "f_max_hz") cfg.f_max_hz = value.get<double>();
      else if (warnings) warnings->push_back("unknown audio_config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception&) {
    throw Error("audio_config has a value of the wrong type");
  }
  ValidateAudioConfig(cfg);
  return cfg;
}

PromptBundle LoadBundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("bundle directory not found: " + dir.string());
  PromptBundle bundle;
  bundle.root = dir;
  const auto meta = ParseJson(ReadBytes(dir / kBundleJson), kBundleJson);
  if (!meta.is_object()) throw Error("bundle.json must be an object");

  static const std::set<std::string> kKnown = {
      "format_version", "model_id", "dim", "logit_scale", "audio_config",
      "encoder_model", "provenance", "checksums"};
  for (const auto& [key, value] : meta.items()) {
    if (!kKnown.contains(key)) {
      bundle.warnings.push_back("unknown bundle.json key '" + key + "'");
    }
  }
  bundle.format_version = Required<int>(meta, "format_version", kBundleJson);
  if (bundle.format_version != kBundleFormatVersion) {
    throw Error("unsupported bundle format version " +
                std::to_string(bundle.format_version) + " (expected " +
                std::to_string(kBundleFormatVersion) + ")");
  }
  bundle.model_id = Required<std::string>(meta, "model_id", kBundleJson);
  const auto dim = Required<std::int64_t>(meta, "dim", kBundleJson);
  if (dim <= 0) throw Error("bundle dim must be positive");
  bundle.dim = static_cast<std::size_t>(dim);
  if (meta.contains("logit_scale") && !meta["logit_scale"].is_null()) {
    bundle.logit_scale = Required<double>(meta, "logit_scale", kBundleJson);
  }
  if (meta.contains("audio_config")) {
    bundle.audio_config = AudioConfigFromJson(meta["audio_config"], &bundle.warnings);
  } else {
    bundle.warnings.push_back("bundle.json has no audio_config; using defaults");
  }
  if (meta.contains("encoder_model") && !meta["encoder_model"].is_null()) {
    bundle.encoder_model = Required<std::string>(meta, "encoder_model", kBundleJson);
  }
  if (meta.contains("provenance")) bundle.provenance = meta["provenance"];

  const auto prompt_bytes = ReadBytes(dir / kPromptsJson);
  const auto embedding_bytes = ReadBytes(dir / kEmbeddingsBin);

  nlohmann::json checksums = meta.value("checksums", nlohmann::json::object());
  auto verify = [&](const std::string& name, auto&& digest) {
    if (!checksums.contains(name)) {
      bundle.warnings.push_back("no checksum recorded for " + name);
      return;
    }
    if (checksums[name] != digest()) throw Error("checksum mismatch for " + name);
  };
  verify(kPromptsJson, [&] { return Sha256Hex(prompt_bytes); });
  verify(kEmbeddingsBin, [&] { return Sha256Hex(embedding_bytes); });
  if (bundle.encoder_model) {
    const auto path = dir / *bundle.encoder_model;
    if (!fs::exists(path)) throw Error("encoder model not found: " + path.string());
    verify(*bundle.encoder_model, [&] { return Sha256HexOfFile(path); });
  }

  const auto prompts = ParseJson(prompt_bytes, kPromptsJson);
  if (!prompts.is_array()) throw Error("prompts.json must be an array");
  for (const auto& p : prompts) {
    Prompt prompt;
    prompt.id = Required<std::string>(p, "id", kPromptsJson);
    prompt.text = Required<std::string>(p, "text", kPromptsJson);
    prompt.role = ParseRole(Required<std::string>(p, "role", kPromptsJson));
    bundle.prompts.push_back(std::move(prompt));
  }

  const std::size_t row_bytes = bundle.dim * 4;
  if (embedding_bytes.size() != row_bytes * bundle.prompts.size()) {
    throw Error("embedding matrix size mismatch");
  }
  for (std::size_t r = 0; r < bundle.prompts.size(); ++r) {
    std::vector<float> row(bundle.dim);
    for (std::size_t c = 0; c < bundle.dim; ++c) {
      const std::uint8_t* b = embedding_bytes.data() + r * row_bytes + c * 4;
      const std::uint32_t u = b[0] | (b[1] << 8) | (b[2] << 16) |
                              (static_cast<std::uint32_t>(b[3]) << 24);
      row[c] = std::bit_cast<float>(u);
    }
    try {
      bundle.embeddings.push_back(EmbeddingVector::FromUnitValues(std::move(row)));
    } catch (const Error& e) {
      throw Error("prompt embedding '" + bundle.prompts[r].id + "': " + e.what());
    }
  }
  ValidateBundle(bundle);
  return bundle;
}

void SaveBundle(const PromptBundle& bundle, const fs::path& dir) {
  ValidateBundle(bundle);
  fs::create_directories(dir);

  const auto prompt_bytes = ToBytes(PromptsJson(bundle.prompts));
  const auto embedding_bytes = EncodeEmbeddings(bundle.embeddings);
  WriteBytes(dir / kPromptsJson, prompt_bytes);
  WriteBytes(dir / kEmbeddingsBin, embedding_bytes);

  nlohmann::json checksums = {{kPromptsJson, Sha256Hex(prompt_bytes)},
                              {kEmbeddingsBin, Sha256Hex(embedding_bytes)}};
  nlohmann::json meta = {{"format_version", bundle.format_version},
                         {"model_id", bundle.model_id},
                         {"dim", bundle.dim},
                         {"audio_config", AudioConfigToJson(bundle.audio_config)}};
  if (bundle.logit_scale) meta["logit_scale"] = *bundle.logit_scale;
  if (!bundle.provenance.is_null()) meta["provenance"] = bundle.provenance;
  if (bundle.encoder_model) {
    const auto source = *bundle.EncoderPath();
    const auto target = dir / *bundle.encoder_model;
    std::error_code ec;
    if (!fs::equivalent(source, target, ec)) {
      fs::copy_file(source, target, fs::copy_options::overwrite_existing);
    }
    meta["encoder_model"] = *bundle.encoder_model;
    checksums[*bundle.encoder_model] = Sha256HexOfFile(target);
  }
  meta["checksums"] = checksums;
  WriteBytes(dir / kBundleJson, ToBytes(meta.dump(2) + "\n"));
}

}  // namespace pamkit
