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

#include "pamkit/eval_stats.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "pamkit/csv.h"
#include "pamkit/error.h"

namespace pamkit {
namespace {

void CheckPair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error("correlation inputs differ in length (" + std::to_string(x.size()) +
                " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw Error("correlation needs at least two points");
}

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Summing sorted values makes the mean independent of input order.
double SortedMean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return Mean(v);
}

std::optional<double> TryCorrelation(double (*fn)(std::span<const double>,
                                                  std::span<const double>),
                                     std::span<const double> x,
                                     std::span<const double> y) {
  if (x.size() < 2) return std::nullopt;
  try {
    return fn(x, y);
  } catch (const Error&) {
    return std::nullopt;
  }
}

CorrelationPair CorrelateColumns(std::span<const double> x,
                                 std::span<const double> y) {
  return {TryCorrelation(&Pearson, x, y), TryCorrelation(&Spearman, x, y)};
}

nlohmann::json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void ValidateRating(const RatingRecord& r) {
  if (r.rater_id.empty() || r.item_id.empty() || r.system_id.empty()) {
    throw Error("rating ids must be non-empty");
  }
  if (!std::isfinite(r.score)) throw Error("rating score must be finite");
  if (r.duration_seconds &&
      (!std::isfinite(*r.duration_seconds) || *r.duration_seconds < 0.0)) {
    throw Error("rating duration must be a non-negative number");
  }
}

double Pearson(std::span<const double> x, std::span<const double> y) {
  CheckPair(x, y);
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("undefined correlation");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> AverageRanks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    // Ranks i+1 .. j share their mean.
    const double rank = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double Spearman(std::span<const double> x, std::span<const double> y) {
  CheckPair(x, y);
  const auto rx = AverageRanks(x);
  const auto ry = AverageRanks(y);
  return Pearson(rx, ry);
}

FilterResult FilterRaters(std::span<const RatingRecord> ratings,
                          const FilterOptions& options) {
  FilterResult result;
  std::vector<const RatingRecord*> fast_enough;
  fast_enough.reserve(ratings.size());
  for (const auto& r : ratings) {
    if (r.duration_seconds && *r.duration_seconds < options.min_duration_seconds) {
      ++result.n_short_records;
    } else {
      fast_enough.push_back(&r);
    }
  }

  struct RaterStats {
    std::size_t count = 0;
    double first = 0.0;
    bool constant = true;
  };
  std::map<std::string, RaterStats> raters;
  for (const RatingRecord* r : fast_enough) {
    RaterStats& s = raters[r->rater_id];
    if (s.count == 0) {
      s.first = r->score;
    } else if (r->score != s.first) {
      s.constant = false;
    }
    ++s.count;
  }
  std::set<std::string> excluded;
  for (const auto& [id, s] : raters) {
    if (s.constant && s.count > options.min_constant_run) excluded.insert(id);
  }
  result.excluded_raters.assign(excluded.begin(), excluded.end());
  for (const RatingRecord* r : fast_enough) {
    if (!excluded.contains(r->rater_id)) result.kept.push_back(*r);
  }
  return result;
}

MosTable AggregateMos(std::span<const RatingRecord> ratings) {
  MosTable table;
  if (ratings.empty()) {
    table.warnings.push_back("no ratings left to aggregate");
    return table;
  }
  struct Acc {
    std::string system_id;
    std::vector<double> scores;
  };
  std::map<std::string, Acc> items;
  for (const auto& r : ratings) {
    ValidateRating(r);
    auto [it, inserted] = items.try_emplace(r.item_id, Acc{r.system_id, {}});
    if (!inserted && it->second.system_id != r.system_id) {
      throw Error("item '" + r.item_id + "' is rated under systems '" +
                  it->second.system_id + "' and '" + r.system_id + "'");
    }
    it->second.scores.push_back(r.score);
  }
  std::map<std::string, std::vector<double>> systems;
  for (auto& [id, acc] : items) {
    const double mos = SortedMean(acc.scores);
    table.items.push_back({id, acc.system_id, mos, acc.scores.size()});
    systems[acc.system_id].push_back(mos);
  }
  for (auto& [id, values] : systems) {
    table.systems.push_back({id, SortedMean(values), values.size()});
  }
  return table;
}

MosTable AggregateMosAfterFilter(std::span<const RatingRecord> all,
                                 std::span<const RatingRecord> kept) {
  MosTable table = AggregateMos(kept);
  std::set<std::string> before;
  for (const auto& r : all) before.insert(r.item_id);
  const std::size_t dropped = before.size() - table.items.size();
  if (dropped > 0) {
    table.warnings.push_back(std::to_string(dropped) +
                             " item(s) dropped: no ratings left after filtering");
  }
  return table;
}

EvalReport Correlate(const MosTable& mos, std::span<const MetricValue> metric) {
  EvalReport report;
  report.warnings = mos.warnings;

  std::map<std::string, double> by_item;
  for (const auto& m : metric) {
    if (!std::isfinite(m.value)) throw Error("metric for item '" + m.item_id + "' is not finite");
    if (!by_item.emplace(m.item_id, m.value).second) {
      throw Error("duplicate metric value for item '" + m.item_id + "'");
    }
  }

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> systems;
  std::size_t matched = 0;
  for (const auto& item : mos.items) {
    auto it = by_item.find(item.item_id);
    if (it == by_item.end()) {
      ++report.n_unmatched_mos;
      continue;
    }
    ++matched;
    report.per_item.push_back({item.item_id, item.system_id, item.mos, it->second});
    auto& [m, v] = systems[item.system_id];
    m.push_back(item.mos);
    v.push_back(it->second);
  }
  report.n_unmatched_metric = by_item.size() - matched;

  std::vector<double> item_mos;
  std::vector<double> item_metric;
  for (const auto& row : report.per_item) {
    item_mos.push_back(row.mos);
    item_metric.push_back(row.metric);
  }
  report.utterance = CorrelateColumns(item_metric, item_mos);

  std::vector<double> sys_mos;
  std::vector<double> sys_metric;
  for (const auto& [id, cols] : systems) {
    const auto& [m, v] = cols;
    EvalSystem row{id, SortedMean(m), SortedMean(v), m.size()};
    sys_mos.push_back(row.mean_mos);
    sys_metric.push_back(row.mean_metric);
    report.per_system.push_back(row);
    report.within_system.push_back({id, m.size(), CorrelateColumns(v, m)});
  }
  report.system = CorrelateColumns(sys_metric, sys_mos);

  if (report.per_item.size() >= 2 && !report.utterance.pcc) {
    report.warnings.push_back("utterance-level correlation undefined (zero variance)");
  }
  if (report.per_system.size() < 2) {
    report.warnings.push_back("system-level correlation needs at least two systems");
  } else if (!report.system.pcc) {
    report.warnings.push_back("system-level correlation undefined (zero variance)");
  }
  return report;
}

EvalReport Evaluate(std::span<const RatingRecord> ratings,
                    std::span<const MetricValue> metric,
                    const FilterOptions& options) {
  const FilterResult filtered = FilterRaters(ratings, options);
  const MosTable table = AggregateMosAfterFilter(ratings, filtered.kept);
  EvalReport report = Correlate(table, metric);
  report.excluded_raters = filtered.excluded_raters;
  report.n_excluded_raters = filtered.excluded_raters.size();
  if (filtered.n_short_records > 0) {
    report.warnings.push_back(std::to_string(filtered.n_short_records) +
                              " record(s) dropped for short duration");
  }
  return report;
}

nlohmann::json ReportToJson(const EvalReport& report) {
  nlohmann::json j;
  j["pcc_utterance"] = OptionalJson(report.utterance.pcc);
  j["srcc_utterance"] = OptionalJson(report.utterance.srcc);
  j["pcc_system"] = OptionalJson(report.system.pcc);
  j["srcc_system"] = OptionalJson(report.system.srcc);
  j["n_items"] = report.per_item.size();
  j["n_systems"] = report.per_system.size();
  j["n_excluded_raters"] = report.n_excluded_raters;
  j["excluded_raters"] = report.excluded_raters;
  j["n_unmatched_metric"] = report.n_unmatched_metric;
  j["n_unmatched_mos"] = report.n_unmatched_mos;
  j["warnings"] = report.warnings;
  auto& per_system = j["per_system"] = nlohmann::json::array();
  for (const auto& s : report.per_system) {
    per_system.push_back({{"system_id", s.system_id},
                          {"mean_mos", s.mean_mos},
                          {"mean_metric", s.mean_metric},
                          {"n_items", s.n_items}});
  }
  auto& within = j["within_system"] = nlohmann::json::array();
  for (const auto& w : report.within_system) {
    within.push_back({{"system_id", w.system_id},
                      {"n_items", w.n_items},
                      {"pcc", OptionalJson(w.corr.pcc)},
                      {"srcc", OptionalJson(w.corr.srcc)}});
  }
  auto& per_item = j["per_item"] = nlohmann::json::array();
  for (const auto& i : report.per_item) {
    per_item.push_back({{"item_id", i.item_id},
                        {"system_id", i.system_id},
                        {"mos", i.mos},
                        {"metric_value", i.metric}});
  }
  return j;
}

std::vector<RatingRecord> ReadRatingsCsv(const std::filesystem::path& path) {
  const CsvTable table = CsvTable::Read(path);
  try {
    const std::size_t rater = table.Column("rater_id");
    const std::size_t item = table.Column("item_id");
    const std::size_t system = table.Column("system_id");
    const std::size_t score = table.Column("score");
    const auto duration = table.FindColumn("duration_seconds");
    std::vector<RatingRecord> out;
    out.reserve(table.size());
    for (std::size_t r = 0; r < table.size(); ++r) {
      const auto& row = table.rows()[r];
      RatingRecord rec{row[rater], row[item], row[system],
                       ParseDouble(row[score], "score"), std::nullopt};
      if (duration && !row[*duration].empty()) {
        rec.duration_seconds = ParseDouble(row[*duration], "duration_seconds");
      }
      try {
        ValidateRating(rec);
      } catch (const Error& e) {
        throw Error("row " + std::to_string(r + 1) + ": " + e.what());
      }
      out.push_back(std::move(rec));
    }
    return out;
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::vector<MetricValue> ReadMetricCsv(const std::filesystem::path& path,
                                       std::string_view column) {
  const CsvTable table = CsvTable::Read(path);
  try {
    const std::size_t item = table.Column("item_id");
    const auto system = table.FindColumn("system_id");
    std::size_t value = 0;
    if (!column.empty()) {
      value = table.Column(column);
    } else if (auto c = table.FindColumn("metric_value")) {
      value = *c;
    } else if (auto p = table.FindColumn("pam")) {
      value = *p;
    } else {
      throw Error("missing required column 'metric_value' (or 'pam')");
    }
    std::vector<MetricValue> out;
    out.reserve(table.size());
    for (const auto& row : table.rows()) {
      out.push_back({row[item], system ? row[*system] : std::string(),
                     ParseDouble(row[value], "metric value")});
    }
    return out;
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace pamkit
