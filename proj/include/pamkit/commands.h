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

#ifndef PAMKIT_COMMANDS_H_
#define PAMKIT_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pamkit/distortion.h"
#include "pamkit/eval_stats.h"

namespace pamkit {

// In-process implementations of the CLI subcommands. Each returns the
// process exit code: 0 success, 1 configuration or input error, 2 when
// some items failed (listed in errors.csv). Progress goes to `out`, problems
// to `err`.

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitPartial = 2;

struct ScoreArgs {
  std::filesystem::path config;
  std::filesystem::path manifest;
  // Override the config file when set.
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::size_t> parallelism;
};

// Manifest columns: file_path[,item_id][,system_id]; other columns are
// ignored. Relative file paths resolve against the manifest's directory and
// item_id defaults to the file stem. Writes scores.csv with
// file_path,item_id,system_id,pam,strategy,tau_used,n_windows in manifest
// order.
int CmdScore(const ScoreArgs& args, std::ostream& out, std::ostream& err);

struct DistortArgs {
  std::filesystem::path spec;
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  std::size_t parallelism = 1;
};

// The spec file holds one entry or an array of entries. An entry is either a
// single distortion ({"kind", "severity", "mu"?, "seed"?}) or a sweep
// ({"kind", "severities"?, "mu"?, "seed"?}; the kind's default ladder when
// severities is omitted). Every *.wav in the input directory gets one
// float32 output per severity, named <stem>__<kind>__<severity>.wav, and
// ladder.csv lists them. ladder.csv doubles as a scoring manifest.
int CmdDistort(const DistortArgs& args, std::ostream& out, std::ostream& err);

// Flattens a distort spec into concrete distortions. Sweep element i gets
// seed + i. Throws on an invalid entry or a non-monotone sweep.
std::vector<DistortionSpec> ExpandDistortionPlan(const nlohmann::json& spec);

struct EvalArgs {
  std::filesystem::path scores;
  std::filesystem::path ratings;
  std::filesystem::path output_dir;
  std::string metric_column;  // empty: metric_value, then pam
  FilterOptions filter;
};

// Ratings are filtered, aggregated to MOS and joined with the metric on
// item_id. Writes report.json, per_item.csv, per_system.csv,
// mos_vs_metric_utterance.svg and mos_vs_metric_system.svg.
int CmdEval(const EvalArgs& args, std::ostream& out, std::ostream& err);

struct SweepReportArgs {
  std::filesystem::path ladder;
  std::filesystem::path scores;
  std::filesystem::path output_dir;
};

// Joins ladder.csv and scores.csv on item_id and writes sweep.csv
// (kind,severity,mean_pam,n) plus sweep.svg with one panel per kind.
int CmdSweepReport(const SweepReportArgs& args, std::ostream& out,
                   std::ostream& err);

struct EmbedArgs {
  std::filesystem::path config;
  std::filesystem::path manifest;
  std::filesystem::path store;
};

// Embeds every window of every manifest file with the configured backend
// and writes a precomputed store keyed by window content.
int CmdEmbed(const EmbedArgs& args, std::ostream& out, std::ostream& err);

struct MockBundleArgs {
  std::filesystem::path output_dir;
  std::size_t dim = 64;
  std::uint64_t seed = 0;
  int sample_rate_hz = 16000;
  double window_seconds = 1.0;
  int n_mels = 32;
  int n_fft = 512;
  int hop_length = 160;
};

// Writes a bundle with the four standard prompts (h1, h2 high; b1, b2 low)
// and random unit embeddings, for use with the mock backend.
int CmdMockBundle(const MockBundleArgs& args, std::ostream& out,
                  std::ostream& err);

}  // namespace pamkit

#endif  // PAMKIT_COMMANDS_H_
