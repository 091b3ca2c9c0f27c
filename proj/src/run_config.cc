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

#include "pamkit/run_config.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <string>

#include "pamkit/error.h"

namespace pamkit {
namespace {

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::vector<std::string> IdList(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw Error(std::string(key) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw Error(std::string(key) + " must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

double NonNegative(const nlohmann::json& j, const char* key) {
  if (!j.is_number()) throw Error(std::string(key) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v) || v < 0.0) throw Error(std::string(key) + " must be >= 0");
  return v;
}

}  // namespace

RunConfig RunConfigFromJson(const nlohmann::json& j,
                            const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error("run config must be a JSON object");
  static const std::set<std::string> kKnown = {
      "config_version", "bundle_path",    "backend",     "strategy",
      "window_seconds", "hop_seconds",    "tau_override", "use_bundle_tau",
      "parallelism",    "seed",           "output_dir",  "precomputed_store",
      "high_ids",       "low_ids",        "pairs"};
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.contains(key)) throw Error("unknown run config key '" + key + "'");
  }
  if (!j.contains("config_version") || !j["config_version"].is_number_integer() ||
      j["config_version"].get<int>() != kRunConfigVersion) {
    throw Error("run config needs \"config_version\": " +
                std::to_string(kRunConfigVersion));
  }

  RunConfig c;
  try {
    if (j.contains("bundle_path")) {
      c.bundle_path = Resolve(base_dir, j["bundle_path"].get<std::string>());
    } else if (const char* env = std::getenv("PAMKIT_BUNDLE"); env && *env) {
      c.bundle_path = env;
    }
    if (j.contains("backend")) c.backend = ParseBackendKind(j["backend"].get<std::string>());
    if (j.contains("strategy")) {
      c.scoring.strategy = ParseStrategy(j["strategy"].get<std::string>());
    }
    if (j.contains("window_seconds")) {
      c.scoring.window_seconds = NonNegative(j["window_seconds"], "window_seconds");
    }
    if (j.contains("hop_seconds")) {
      c.scoring.hop_seconds = NonNegative(j["hop_seconds"], "hop_seconds");
    }
    if (j.contains("tau_override") && !j["tau_override"].is_null()) {
      const double tau = j["tau_override"].get<double>();
      if (!(tau > 0.0) || !std::isfinite(tau)) throw Error("tau_override must be > 0");
      c.scoring.tau_override = tau;
    }
    if (j.contains("use_bundle_tau")) c.scoring.use_bundle_tau = j["use_bundle_tau"].get<bool>();
    if (j.contains("parallelism")) {
      const auto& p = j["parallelism"];
      if (!p.is_number_integer() || p.get<long long>() < 1) {
        throw Error("parallelism must be a positive integer");
      }
      c.parallelism = p.get<std::size_t>();
    }
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) throw Error("seed must be a non-negative integer");
      c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("output_dir")) {
      c.output_dir = Resolve(base_dir, j["output_dir"].get<std::string>());
    }
    if (j.contains("precomputed_store")) {
      c.precomputed_store = Resolve(base_dir, j["precomputed_store"].get<std::string>());
    }
    if (j.contains("high_ids")) c.scoring.high_ids = IdList(j["high_ids"], "high_ids");
    if (j.contains("low_ids")) c.scoring.low_ids = IdList(j["low_ids"], "low_ids");
    if (j.contains("pairs")) {
      if (!j["pairs"].is_array()) throw Error("pairs must be an array of [high, low]");
      for (const auto& p : j["pairs"]) {
        const auto ids = IdList(p, "pairs");
        if (ids.size() != 2) throw Error("each pair must be [high_id, low_id]");
        c.scoring.pairs.emplace_back(ids[0], ids[1]);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("run config: wrong value type: ") + e.what());
  }
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(path.string() + ": cannot open run config");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": invalid JSON: " + e.what());
  }
  try {
    return RunConfigFromJson(j, path.parent_path());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void ValidateRunConfig(const RunConfig& config) {
  if (config.bundle_path.empty()) {
    throw Error("no bundle: set bundle_path or the PAMKIT_BUNDLE environment variable");
  }
  if (!std::filesystem::is_directory(config.bundle_path)) {
    throw Error("bundle directory not found: " + config.bundle_path.string());
  }
  if (config.parallelism < 1) throw Error("parallelism must be >= 1");
  if (config.backend == BackendKind::kPrecomputed) {
    if (config.precomputed_store.empty()) {
      throw Error("backend 'precomputed' needs precomputed_store");
    }
    if (!std::filesystem::is_regular_file(config.precomputed_store)) {
      throw Error("precomputed store not found: " + config.precomputed_store.string());
    }
  }
}

}  // namespace pamkit
