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

#ifndef PAMKIT_RUN_CONFIG_H_
#define PAMKIT_RUN_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "json.hpp"
#include "pamkit/backend.h"
#include "pamkit/scoring.h"

namespace pamkit {

inline constexpr int kRunConfigVersion = 1;

// Settings for `pamkit score`, read from a JSON file:
//
//   {"config_version": 1, "bundle_path": "bundle/", "backend": "mock",
//    "strategy": "pam", "window_seconds": 7, "hop_seconds": 7,
//    "tau_override": null, "use_bundle_tau": false, "parallelism": 4,
//    "seed": 0, "output_dir": "out", "precomputed_store": "store.json",
//    "high_ids": ["h1"], "low_ids": ["b1"], "pairs": [["h1", "b2"]]}
//
// Only config_version is required. Unknown keys are errors. Relative paths
// are resolved against the config file's directory. A missing bundle_path
// falls back to the PAMKIT_BUNDLE environment variable.
struct RunConfig {
  std::filesystem::path bundle_path;
  BackendKind backend = BackendKind::kNeural;
  ScoringConfig scoring;
  std::size_t parallelism = 1;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;  // empty means the working directory
  std::filesystem::path precomputed_store;
};

RunConfig RunConfigFromJson(const nlohmann::json& j,
                            const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Checks that referenced paths exist and values are in range.
void ValidateRunConfig(const RunConfig& config);

}  // namespace pamkit

#endif  // PAMKIT_RUN_CONFIG_H_
