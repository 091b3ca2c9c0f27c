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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pamkit/commands.h"

int main(int argc, char** argv) {
  CLI::App app{"pamkit: prompt-based audio quality scoring"};
  app.require_subcommand(1);
  int code = 0;

  pamkit::ScoreArgs score;
  std::string score_out;
  std::size_t score_jobs = 0;
  auto* s = app.add_subcommand("score", "Score WAV files listed in a manifest");
  s->add_option("--config", score.config, "Run config JSON")->required();
  s->add_option("--manifest", score.manifest, "CSV with file_path[,item_id][,system_id]")
      ->required();
  s->add_option("--out", score_out, "Output directory (overrides output_dir)");
  s->add_option("--parallelism", score_jobs, "Worker threads (overrides the config)")
      ->check(CLI::PositiveNumber);
  s->callback([&] {
    if (!score_out.empty()) score.output_dir = score_out;
    if (score_jobs > 0) score.parallelism = score_jobs;
    code = pamkit::CmdScore(score, std::cout, std::cerr);
  });

  pamkit::DistortArgs distort;
  auto* d = app.add_subcommand("distort", "Apply distortions to every WAV in a directory");
  d->add_option("--spec", distort.spec, "Distortion spec JSON")->required();
  d->add_option("--in", distort.input_dir, "Input directory")->required();
  d->add_option("--out", distort.output_dir, "Output directory")->required();
  d->add_option("--parallelism", distort.parallelism, "Worker threads")
      ->check(CLI::PositiveNumber);
  d->callback([&] { code = pamkit::CmdDistort(distort, std::cout, std::cerr); });

  pamkit::EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Correlate a metric with MOS from ratings");
  e->add_option("--scores", eval.scores, "Metric CSV (item_id plus a value column)")
      ->required();
  e->add_option("--ratings", eval.ratings, "Ratings CSV")->required();
  e->add_option("--out", eval.output_dir, "Output directory")->required();
  e->add_option("--metric-column", eval.metric_column,
                "Value column (default: metric_value, then pam)");
  e->add_option("--min-constant-run", eval.filter.min_constant_run,
                "Drop raters with constant scores over more than this many samples");
  e->add_option("--min-duration", eval.filter.min_duration_seconds,
                "Drop ratings that took fewer seconds than this");
  e->callback([&] { code = pamkit::CmdEval(eval, std::cout, std::cerr); });

  pamkit::SweepReportArgs sweep;
  auto* w = app.add_subcommand("sweep-report", "Mean PAM per distortion severity");
  w->add_option("--ladder", sweep.ladder, "ladder.csv from distort")->required();
  w->add_option("--scores", sweep.scores, "scores.csv from score")->required();
  w->add_option("--out", sweep.output_dir, "Output directory")->required();
  w->callback([&] { code = pamkit::CmdSweepReport(sweep, std::cout, std::cerr); });

  pamkit::EmbedArgs embed;
  auto* m = app.add_subcommand("embed", "Write a precomputed embedding store");
  m->add_option("--config", embed.config, "Run config JSON")->required();
  m->add_option("--manifest", embed.manifest, "CSV with file_path")->required();
  m->add_option("--store", embed.store, "Output store JSON")->required();
  m->callback([&] { code = pamkit::CmdEmbed(embed, std::cout, std::cerr); });

  pamkit::MockBundleArgs mock;
  auto* b = app.add_subcommand("mock-bundle", "Write a bundle with random prompt embeddings");
  b->add_option("--out", mock.output_dir, "Bundle directory")->required();
  b->add_option("--dim", mock.dim, "Embedding dimension")->check(CLI::PositiveNumber);
  b->add_option("--seed", mock.seed, "Embedding seed");
  b->add_option("--sample-rate", mock.sample_rate_hz, "Bundle sample rate in Hz");
  b->add_option("--window-seconds", mock.window_seconds, "Encoder window length");
  b->add_option("--n-mels", mock.n_mels, "Mel bands");
  b->add_option("--n-fft", mock.n_fft, "FFT size");
  b->add_option("--hop-length", mock.hop_length, "Hop in samples");
  b->callback([&] { code = pamkit::CmdMockBundle(mock, std::cout, std::cerr); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : pamkit::kExitInputError;
  }
  return code;
}
