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

#ifndef PAMKIT_SCORING_H_
#define PAMKIT_SCORING_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pamkit/audio.h"
#include "pamkit/backend.h"
#include "pamkit/bundle.h"
#include "pamkit/embedding.h"

namespace pamkit {

// Dot product of two unit vectors, clamped to [-1, 1].
double CosineSimilarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Baseline: (cos(v, u_h) + 1) / 2.
double SinglePromptScore(const EmbeddingVector& audio,
                         const EmbeddingVector& high);

// Two-class softmax over logits z_j = tau * (u_j . v), returning the
// probability of the high-quality prompt. Evaluated as the logistic of the
// logit difference with the larger logit subtracted, so it never
// overflows. The smaller probability is computed directly and the larger
// as its complement, which makes
//   PamFromLogits(a, b, t) + PamFromLogits(b, a, t) == 1
// hold exactly in floating point.
double PamFromLogits(double dot_high, double dot_low, double tau);
double PamWindow(const EmbeddingVector& audio, const EmbeddingVector& high,
                 const EmbeddingVector& low, double tau);

// Averages the dot products over each prompt list, then applies the
// two-class softmax.
double PamAvgSim(const EmbeddingVector& audio,
                 std::span<const EmbeddingVector> highs,
                 std::span<const EmbeddingVector> lows, double tau);

struct PromptPair {
  EmbeddingVector high;
  EmbeddingVector low;
};

// Mean of PamWindow over prompt pairs.
double PamAvgPairs(const EmbeddingVector& audio,
                   std::span<const PromptPair> pairs, double tau);

enum class Strategy { kSingle, kPam, kAvgSim, kAvgPairs };

std::string_view StrategyName(Strategy s);
Strategy ParseStrategy(std::string_view name);

struct ScoringConfig {
  Strategy strategy = Strategy::kPam;
  // Empty lists mean the defaults: single/pam use h1 (and b1), falling back
  // to the first prompt of each role; avg_sim uses {h1, h2} vs {b1, b2};
  // avg_pairs uses [h1, b2] and [h2, b1].
  std::vector<std::string> high_ids;
  std::vector<std::string> low_ids;
  std::vector<std::pair<std::string, std::string>> pairs;
  // tau_override wins; otherwise the bundle's logit_scale is used only when
  // use_bundle_tau is set; otherwise 1.
  std::optional<double> tau_override;
  bool use_bundle_tau = false;
  // 0 means: take window_seconds from the bundle, and hop = window.
  double window_seconds = 0.0;
  double hop_seconds = 0.0;
};

struct PamResult {
  double pam = 0.0;
  std::vector<double> per_window;
  Strategy strategy = Strategy::kPam;
  std::vector<std::string> prompt_ids_used;
  double tau_used = 1.0;
};

// Prompt embeddings picked out of a bundle for one strategy.
class PromptSelection {
 public:
  PromptSelection(const PromptBundle& bundle, const ScoringConfig& config);

  Strategy strategy() const { return strategy_; }
  double tau() const { return tau_; }
  const std::vector<std::string>& ids() const { return ids_; }
  double Score(const EmbeddingVector& audio) const;

 private:
  Strategy strategy_;
  double tau_;
  std::vector<std::string> ids_;
  std::vector<EmbeddingVector> highs_;
  std::vector<EmbeddingVector> lows_;
  std::vector<PromptPair> pairs_;
};

double ResolveTau(const PromptBundle& bundle, const ScoringConfig& config);

// Resample to the bundle rate, split into windows, embed and score each
// window, and average the window scores. `source` tags windows for the
// precomputed backend's origin lookup.
PamResult ScoreClip(const EmbeddingBackend& backend, const PromptBundle& bundle,
                    const AudioClip& clip, const ScoringConfig& config,
                    std::string_view source = {});

struct BatchItem {
  std::filesystem::path path;
  std::optional<PamResult> result;
  std::string error;  // set when result is empty
};

// Scores every file; output order matches `paths`. Per-file failures are
// recorded in the item and never abort the batch. Results do not depend on
// `parallelism`.
std::vector<BatchItem> ScoreBatch(const EmbeddingBackend& backend,
                                  const PromptBundle& bundle,
                                  std::span<const std::filesystem::path> paths,
                                  const ScoringConfig& config,
                                  std::size_t parallelism);

}  // namespace pamkit

#endif  // PAMKIT_SCORING_H_
