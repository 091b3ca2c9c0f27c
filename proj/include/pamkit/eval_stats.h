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

#ifndef PAMKIT_EVAL_STATS_H_
#define PAMKIT_EVAL_STATS_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pamkit {

struct RatingRecord {
  std::string rater_id;
  std::string item_id;
  std::string system_id;
  double score = 0.0;
  std::optional<double> duration_seconds;

  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

// Throws on empty ids, a non-finite score or a negative duration.
void ValidateRating(const RatingRecord& r);

// Pearson correlation with mean-centered accumulation. Throws on length
// mismatch, fewer than two points, or "undefined correlation" when either
// side has zero variance.
double Pearson(std::span<const double> x, std::span<const double> y);

// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> AverageRanks(std::span<const double> x);

// Pearson over average ranks.
double Spearman(std::span<const double> x, std::span<const double> y);

struct FilterOptions {
  // A rater is dropped when all of their scores are equal and they rated
  // more than this many samples.
  std::size_t min_constant_run = 5;
  // Individual records faster than this are dropped.
  double min_duration_seconds = 10.0;
};

struct FilterResult {
  std::vector<RatingRecord> kept;             // input order preserved
  std::vector<std::string> excluded_raters;   // sorted
  std::size_t n_short_records = 0;
};

// Drops records with duration below the threshold first, then every rater
// whose remaining scores are constant across more than min_constant_run
// records. Records without a duration are never dropped for speed. The
// result is idempotent: filtering `kept` again changes nothing.
FilterResult FilterRaters(std::span<const RatingRecord> ratings,
                          const FilterOptions& options = {});

struct ItemMos {
  std::string item_id;
  std::string system_id;
  double mos = 0.0;
  std::size_t n_ratings = 0;
};

struct SystemMos {
  std::string system_id;
  double mos = 0.0;  // unweighted mean of the item MOS values
  std::size_t n_items = 0;
};

struct MosTable {
  std::vector<ItemMos> items;      // sorted by item_id
  std::vector<SystemMos> systems;  // sorted by system_id
  std::vector<std::string> warnings;
};

// Per-item arithmetic mean of scores, then per-system mean over items. The
// output does not depend on the order of `ratings`. An item rated under two
// different system ids is an error.
MosTable AggregateMos(std::span<const RatingRecord> ratings);

// Like AggregateMos on `kept`, also warning about items of `all` that lost
// every rating to filtering.
MosTable AggregateMosAfterFilter(std::span<const RatingRecord> all,
                                 std::span<const RatingRecord> kept);

struct MetricValue {
  std::string item_id;
  std::string system_id;  // may be empty; the ratings' system id wins
  double value = 0.0;
};

struct CorrelationPair {
  std::optional<double> pcc;
  std::optional<double> srcc;
};

struct EvalItem {
  std::string item_id;
  std::string system_id;
  double mos = 0.0;
  double metric = 0.0;
};

struct EvalSystem {
  std::string system_id;
  double mean_mos = 0.0;
  double mean_metric = 0.0;
  std::size_t n_items = 0;
};

struct WithinSystem {
  std::string system_id;
  std::size_t n_items = 0;
  CorrelationPair corr;
};

struct EvalReport {
  std::vector<EvalItem> per_item;      // sorted by item_id
  std::vector<EvalSystem> per_system;  // sorted by system_id
  // Pooled over all items, and over per-system means. Absent when there is
  // too little data or a side has zero variance.
  CorrelationPair utterance;
  CorrelationPair system;
  // Item-level correlation inside each system, for per-model analyses.
  std::vector<WithinSystem> within_system;
  std::size_t n_excluded_raters = 0;
  std::vector<std::string> excluded_raters;
  std::size_t n_unmatched_metric = 0;  // metric rows with no MOS
  std::size_t n_unmatched_mos = 0;     // MOS items with no metric
  std::vector<std::string> warnings;
};

// Joins MOS and metric values on item_id and fills the correlations. Throws
// on duplicate metric item ids.
EvalReport Correlate(const MosTable& mos, std::span<const MetricValue> metric);

// filter -> aggregate -> correlate.
EvalReport Evaluate(std::span<const RatingRecord> ratings,
                    std::span<const MetricValue> metric,
                    const FilterOptions& options = {});

// Full-precision JSON; absent correlations are null.
nlohmann::json ReportToJson(const EvalReport& report);

// Header rater_id,item_id,system_id,score[,duration_seconds]. An empty
// duration cell means unknown.
std::vector<RatingRecord> ReadRatingsCsv(const std::filesystem::path& path);

// Header item_id[,system_id] plus a value column: `column` when given,
// otherwise metric_value, otherwise pam.
std::vector<MetricValue> ReadMetricCsv(const std::filesystem::path& path,
                                       std::string_view column = {});

}  // namespace pamkit

#endif  // PAMKIT_EVAL_STATS_H_
