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

#include "pamkit/commands.h"

#include <algorithm>
#include <cctype>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>

#include "pamkit/audio.h"
#include "pamkit/backend.h"
#include "pamkit/bundle.h"
#include "pamkit/csv.h"
#include "pamkit/error.h"
#include "pamkit/format.h"
#include "pamkit/parallel.h"
#include "pamkit/plot.h"
#include "pamkit/rng.h"
#include "pamkit/run_config.h"
#include "pamkit/scoring.h"

namespace pamkit {
namespace fs = std::filesystem;
namespace {

struct ManifestRow {
  std::string file_path;  // as written in the manifest
  fs::path resolved;
  std::string item_id;
  std::string system_id;
};

std::vector<ManifestRow> ReadManifest(const fs::path& path) {
  const CsvTable table = CsvTable::Read(path);
  std::size_t file_col = 0;
  try {
    file_col = table.Column("file_path");
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  const auto item_col = table.FindColumn("item_id");
  const auto system_col = table.FindColumn("system_id");
  std::vector<ManifestRow> rows;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto& row = table.rows()[r];
    ManifestRow m;
    m.file_path = row[file_col];
    if (m.file_path.empty()) {
      throw Error(path.string() + ": row " + std::to_string(r + 1) + ": empty file_path");
    }
    const fs::path p(m.file_path);
    m.resolved = p.is_absolute() ? p : path.parent_path() / p;
    m.item_id = item_col && !row[*item_col].empty() ? row[*item_col] : p.stem().string();
    m.system_id = system_col ? row[*system_col] : std::string();
    if (!seen.insert(m.item_id).second) {
      throw Error(path.string() + ": duplicate item_id '" + m.item_id + "'");
    }
    rows.push_back(std::move(m));
  }
  return rows;
}

// Loads the bundle and applies a window override, which only backends
// without a fixed encoder input can honor.
PromptBundle PrepareBundle(const RunConfig& config) {
  PromptBundle bundle = LoadBundle(config.bundle_path);
  const double window = config.scoring.window_seconds;
  if (window > 0.0 && window != bundle.audio_config.window_seconds) {
    if (config.backend == BackendKind::kNeural) {
      throw Error("window_seconds " + FormatDouble(window) +
                  " differs from the encoder's fixed input of " +
                  FormatDouble(bundle.audio_config.window_seconds) + " s");
    }
    bundle.audio_config.window_seconds = window;
  }
  return bundle;
}

std::unique_ptr<EmbeddingBackend> BackendFor(const RunConfig& config,
                                             const PromptBundle& bundle) {
  return MakeBackend(bundle, BackendOptions{config.backend, config.seed,
                                            config.precomputed_store});
}

fs::path EnsureDir(const fs::path& dir) {
  const fs::path out = dir.empty() ? fs::path(".") : dir;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw Error("cannot create output directory " + out.string());
  }
  return out;
}

std::string LowerExtension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

nlohmann::json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(path.string() + ": cannot open");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": invalid JSON: " + e.what());
  }
}

void CheckMonotone(const std::vector<double>& s) {
  if (s.size() < 2) return;
  const bool up = s[1] > s[0];
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (up ? !(s[i] > s[i - 1]) : !(s[i] < s[i - 1])) {
      throw Error("sweep severities must be strictly monotone");
    }
  }
}

void ExpandEntry(const nlohmann::json& entry, std::vector<DistortionSpec>& out) {
  if (!entry.is_object()) throw Error("distortion spec entries must be objects");
  if (entry.contains("severity") || entry.contains("bits")) {
    out.push_back(SpecFromJson(entry));
    return;
  }
  static const std::set<std::string> kSweepKeys = {"kind", "severities", "mu", "seed"};
  for (const auto& [key, value] : entry.items()) {
    if (!kSweepKeys.contains(key)) throw Error("unknown sweep key '" + key + "'");
  }
  if (!entry.contains("kind") || !entry["kind"].is_string()) {
    throw Error("distortion spec needs a \"kind\"");
  }
  try {
    const DistortionKind kind = ParseKind(entry["kind"].get<std::string>());
    const std::vector<double> severities =
        entry.contains("severities") ? entry["severities"].get<std::vector<double>>()
                                     : DefaultSeverities(kind);
    if (severities.empty()) throw Error("sweep needs at least one severity");
    CheckMonotone(severities);
    const double mu = entry.value("mu", 255.0);
    const std::uint64_t seed = entry.value("seed", std::uint64_t{0});
    for (std::size_t i = 0; i < severities.size(); ++i) {
      DistortionSpec spec{kind, severities[i], mu, seed + i};
      ValidateSpec(spec);
      out.push_back(spec);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("sweep spec: wrong value type: ") + e.what());
  }
}

std::string OutputStem(const std::string& stem, const DistortionSpec& spec) {
  return stem + "__" + std::string(KindName(spec.kind)) + "__" +
         FormatDouble(spec.severity);
}

// Runs a command body, mapping pamkit and I/O errors to exit code 1.
template <typename Fn>
int Guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

void WriteErrors(const fs::path& dir,
                 const std::vector<std::vector<std::string>>& rows) {
  const fs::path path = dir / "errors.csv";
  if (rows.empty()) {
    std::error_code ec;
    fs::remove(path, ec);
    return;
  }
  WriteCsv(path, {"file_path", "item_id", "error"}, rows);
}

}  // namespace

int CmdScore(const ScoreArgs& args, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    RunConfig config = LoadRunConfig(args.config);
    if (args.output_dir) config.output_dir = *args.output_dir;
    if (args.parallelism) config.parallelism = *args.parallelism;
    ValidateRunConfig(config);
    const std::vector<ManifestRow> manifest = ReadManifest(args.manifest);

    const PromptBundle bundle = PrepareBundle(config);
    for (const auto& w : bundle.warnings) err << "warning: bundle: " << w << "\n";
    const auto backend = BackendFor(config, bundle);
    ScoringConfig scoring = config.scoring;
    scoring.window_seconds = 0.0;  // already applied to the backend

    std::vector<fs::path> paths;
    for (const auto& m : manifest) paths.push_back(m.resolved);
    const auto items = ScoreBatch(*backend, bundle, paths, scoring, config.parallelism);

    const fs::path dir = EnsureDir(config.output_dir);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<std::string>> errors;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const ManifestRow& m = manifest[i];
      if (items[i].result) {
        const PamResult& r = *items[i].result;
        rows.push_back({m.file_path, m.item_id, m.system_id, FormatDouble(r.pam),
                        std::string(StrategyName(r.strategy)),
                        FormatDouble(r.tau_used), std::to_string(r.per_window.size())});
      } else {
        errors.push_back({m.file_path, m.item_id, items[i].error});
        err << "error: " << m.file_path << ": " << items[i].error << "\n";
      }
    }
    WriteCsv(dir / "scores.csv",
             {"file_path", "item_id", "system_id", "pam", "strategy", "tau_used",
              "n_windows"},
             rows);
    WriteErrors(dir, errors);
    out << "scored " << rows.size() << " of " << items.size() << " file(s) with "
        << backend->name() << " backend -> " << (dir / "scores.csv").string() << "\n";
    return errors.empty() ? kExitOk : kExitPartial;
  });
}

std::vector<DistortionSpec> ExpandDistortionPlan(const nlohmann::json& spec) {
  std::vector<DistortionSpec> plan;
  if (spec.is_array()) {
    if (spec.empty()) throw Error("distortion spec array is empty");
    for (const auto& entry : spec) ExpandEntry(entry, plan);
  } else {
    ExpandEntry(spec, plan);
  }
  std::set<std::string> names;
  for (const auto& s : plan) {
    if (!names.insert(OutputStem("", s)).second) {
      throw Error("distortion spec repeats " + std::string(KindName(s.kind)) + " at " +
                  FormatDouble(s.severity));
    }
  }
  return plan;
}

int CmdDistort(const DistortArgs& args, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    const std::vector<DistortionSpec> plan = ExpandDistortionPlan(ReadJsonFile(args.spec));
    if (!fs::is_directory(args.input_dir)) {
      throw Error("input directory not found: " + args.input_dir.string());
    }
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(args.input_dir)) {
      if (entry.is_regular_file() && LowerExtension(entry.path()) == ".wav") {
        inputs.push_back(entry.path());
      }
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) throw Error("no .wav files in " + args.input_dir.string());
    const fs::path dir = EnsureDir(args.output_dir);

    // One ladder block per input, filled in parallel and emitted in order.
    std::vector<std::vector<std::vector<std::string>>> ladder(inputs.size());
    std::vector<std::vector<std::vector<std::string>>> errors(inputs.size());
    ParallelFor(inputs.size(), args.parallelism, [&](std::size_t i) {
      const std::string stem = inputs[i].stem().string();
      AudioClip clip({0.0f}, 1);
      try {
        clip = LoadWav(inputs[i]);
      } catch (const std::exception& e) {
        errors[i].push_back({inputs[i].filename().string(), stem, e.what()});
        return;
      }
      for (const auto& spec : plan) {
        const std::string name = OutputStem(stem, spec);
        try {
          SaveWav(ApplyDistortion(clip, spec), dir / (name + ".wav"), WavEncoding::kFloat32);
          ladder[i].push_back({name + ".wav", name,
                               std::string(KindName(spec.kind)) + "__" +
                                   FormatDouble(spec.severity),
                               stem, std::string(KindName(spec.kind)),
                               FormatDouble(spec.severity), FormatDouble(spec.mu),
                               std::to_string(spec.seed)});
        } catch (const std::exception& e) {
          errors[i].push_back({name + ".wav", name, e.what()});
        }
      }
    });

    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<std::string>> error_rows;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      rows.insert(rows.end(), ladder[i].begin(), ladder[i].end());
      for (const auto& e : errors[i]) {
        err << "error: " << e[0] << ": " << e[2] << "\n";
        error_rows.push_back(e);
      }
    }
    WriteCsv(dir / "ladder.csv",
             {"file_path", "item_id", "system_id", "source_item", "kind", "severity",
              "mu", "seed"},
             rows);
    WriteErrors(dir, error_rows);
    out << "wrote " << rows.size() << " distorted file(s) from " << inputs.size()
        << " input(s) -> " << dir.string() << "\n";
    return error_rows.empty() ? kExitOk : kExitPartial;
  });
}

int CmdEval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    const auto ratings = ReadRatingsCsv(args.ratings);
    const auto metric = ReadMetricCsv(args.scores, args.metric_column);
    const EvalReport report = Evaluate(ratings, metric, args.filter);
    if (report.per_item.empty()) {
      throw Error("empty join: no item_id appears in both " + args.scores.string() +
                  " and the filtered ratings");
    }
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";

    const fs::path dir = EnsureDir(args.output_dir);
    WriteTextFile(dir / "report.json", ReportToJson(report).dump(2) + "\n");

    std::vector<std::vector<std::string>> items;
    std::vector<double> item_mos;
    std::vector<double> item_metric;
    for (const auto& r : report.per_item) {
      items.push_back({r.item_id, r.system_id, FormatDouble(r.mos), FormatDouble(r.metric)});
      item_mos.push_back(r.mos);
      item_metric.push_back(r.metric);
    }
    WriteCsv(dir / "per_item.csv", {"item_id", "system_id", "mos", "metric_value"}, items);

    std::vector<std::vector<std::string>> systems;
    std::vector<double> sys_mos;
    std::vector<double> sys_metric;
    for (const auto& s : report.per_system) {
      systems.push_back({s.system_id, FormatDouble(s.mean_mos), FormatDouble(s.mean_metric),
                         std::to_string(s.n_items)});
      sys_mos.push_back(s.mean_mos);
      sys_metric.push_back(s.mean_metric);
    }
    WriteCsv(dir / "per_system.csv", {"system_id", "mean_mos", "mean_metric", "n_items"},
             systems);

    const std::string metric_name = args.metric_column.empty() ? "metric" : args.metric_column;
    WriteTextFile(dir / "mos_vs_metric_utterance.svg",
                  RenderScatterSvg({"Utterance level", metric_name, "MOS", item_metric,
                                    item_mos, report.utterance.pcc}));
    WriteTextFile(dir / "mos_vs_metric_system.svg",
                  RenderScatterSvg({"System level", "mean " + metric_name, "mean MOS",
                                    sys_metric, sys_mos, report.system.pcc}));

    auto show = [](const std::optional<double>& v) {
      return v ? FormatFixed(*v, 4) : std::string("n/a");
    };
    out << "items " << report.per_item.size() << ", systems " << report.per_system.size()
        << ", excluded raters " << report.n_excluded_raters << "\n"
        << "utterance PCC " << show(report.utterance.pcc) << " SRCC "
        << show(report.utterance.srcc) << "\n"
        << "system    PCC " << show(report.system.pcc) << " SRCC "
        << show(report.system.srcc) << "\n";
    return kExitOk;
  });
}

int CmdSweepReport(const SweepReportArgs& args, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    const CsvTable ladder = CsvTable::Read(args.ladder);
    const std::size_t l_item = ladder.Column("item_id");
    const std::size_t l_kind = ladder.Column("kind");
    const std::size_t l_sev = ladder.Column("severity");
    const auto metric = ReadMetricCsv(args.scores, "pam");
    std::map<std::string, double> pam;
    for (const auto& m : metric) pam.emplace(m.item_id, m.value);

    // kind -> severity -> scores
    std::map<std::string, std::map<double, std::vector<double>>> groups;
    std::size_t missing = 0;
    for (const auto& row : ladder.rows()) {
      auto it = pam.find(row[l_item]);
      if (it == pam.end()) {
        ++missing;
        continue;
      }
      groups[row[l_kind]][ParseDouble(row[l_sev], "severity")].push_back(it->second);
    }
    if (groups.empty()) {
      throw Error("join failure: no ladder item_id has a score in " + args.scores.string());
    }
    if (missing > 0) err << "warning: " << missing << " ladder row(s) have no score\n";

    const fs::path dir = EnsureDir(args.output_dir);
    std::vector<std::vector<std::string>> rows;
    std::vector<LineSeries> series;
    for (const auto& [kind, by_severity] : groups) {
      LineSeries s{kind, "severity (" + kind + ")", {}, {}};
      for (const auto& [severity, values] : by_severity) {
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        double sum = 0.0;
        for (double v : sorted) sum += v;
        const double mean = sum / static_cast<double>(sorted.size());
        rows.push_back({kind, FormatDouble(severity), FormatDouble(mean),
                        std::to_string(sorted.size())});
        s.x.push_back(severity);
        s.y.push_back(mean);
      }
      series.push_back(std::move(s));
    }
    WriteCsv(dir / "sweep.csv", {"kind", "severity", "mean_pam", "n"}, rows);
    WriteTextFile(dir / "sweep.svg", RenderLinePanelsSvg("Mean PAM", "mean PAM", series));
    out << "wrote " << rows.size() << " sweep point(s) across " << series.size()
        << " kind(s) -> " << dir.string() << "\n";
    return kExitOk;
  });
}

int CmdEmbed(const EmbedArgs& args, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    const RunConfig config = LoadRunConfig(args.config);
    ValidateRunConfig(config);
    if (config.backend == BackendKind::kPrecomputed) {
      throw Error("embed needs a computing backend (mock or neural)");
    }
    const auto manifest = ReadManifest(args.manifest);
    const PromptBundle bundle = PrepareBundle(config);
    const auto backend = BackendFor(config, bundle);
    const AudioConfig& cfg = backend->audio_config();
    const double hop = config.scoring.hop_seconds > 0.0 ? config.scoring.hop_seconds
                                                         : cfg.window_seconds;

    std::map<std::string, EmbeddingVector> entries;
    std::mutex mu;
    std::vector<std::string> failures(manifest.size());
    ParallelFor(manifest.size(), config.parallelism, [&](std::size_t i) {
      try {
        const AudioClip clip = Resample(LoadWav(manifest[i].resolved), cfg.sample_rate_hz);
        for (const auto& w : WindowClip(clip, cfg.window_seconds, hop)) {
          EmbeddingVector v = backend->Embed(w);
          std::lock_guard lock(mu);
          entries.insert_or_assign(ContentKey(w), std::move(v));
        }
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    });
    std::size_t n_failed = 0;
    for (std::size_t i = 0; i < manifest.size(); ++i) {
      if (!failures[i].empty()) {
        ++n_failed;
        err << "error: " << manifest[i].file_path << ": " << failures[i] << "\n";
      }
    }
    SavePrecomputedStore(args.store, backend->dim(), entries);
    out << "stored " << entries.size() << " window embedding(s) -> " << args.store.string()
        << "\n";
    return n_failed == 0 ? kExitOk : kExitPartial;
  });
}

int CmdMockBundle(const MockBundleArgs& args, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    if (args.dim < 1) throw Error("dim must be >= 1");
    PromptBundle bundle;
    bundle.model_id = "mock";
    bundle.dim = args.dim;
    bundle.audio_config.sample_rate_hz = args.sample_rate_hz;
    bundle.audio_config.window_seconds = args.window_seconds;
    bundle.audio_config.n_mels = args.n_mels;
    bundle.audio_config.n_fft = args.n_fft;
    bundle.audio_config.hop_length = args.hop_length;
    bundle.prompts = {{"h1", "the sound is clear and clean", PromptRole::kHigh},
                      {"b1", "the sound is noisy and with artifacts", PromptRole::kLow},
                      {"h2", "the sound quality is good", PromptRole::kHigh},
                      {"b2", "the sound quality is bad", PromptRole::kLow}};
    Xoshiro256 rng(args.seed);
    for (std::size_t p = 0; p < bundle.prompts.size(); ++p) {
      std::vector<double> raw(args.dim);
      for (double& v : raw) v = rng.Gaussian();
      bundle.embeddings.push_back(EmbeddingVector::Normalized(raw));
    }
    bundle.provenance = {{"generator", "pamkit mock-bundle"}, {"seed", args.seed}};
    ValidateBundle(bundle);
    SaveBundle(bundle, args.output_dir);
    out << "wrote mock bundle (dim " << args.dim << ") -> " << args.output_dir.string()
        << "\n";
    return kExitOk;
  });
}

}  // namespace pamkit
