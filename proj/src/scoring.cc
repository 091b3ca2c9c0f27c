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

#include "pamkit/scoring.h"

#include <algorithm>
#include <cmath>
#include <exception>

#include "pamkit/error.h"
#include "pamkit/parallel.h"

namespace pamkit {
namespace {

void CheckTau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error("tau must be a positive finite number");
}

const EmbeddingVector& RoleChecked(const PromptBundle& bundle,
                                   const std::string& id, PromptRole role) {
  const Prompt& p = bundle.PromptById(id);
  if (p.role != role) {
    throw Error("prompt '" + id + "' has role " + std::string(RoleName(p.role)) +
                ", expected " + std::string(RoleName(role)));
  }
  return bundle.EmbeddingById(id);
}

// Preferred id when present, otherwise the first prompt with `role`.
std::string DefaultId(const PromptBundle& bundle, const char* preferred,
                      PromptRole role) {
  if (auto i = bundle.FindPrompt(preferred);
      i && bundle.prompts[*i].role == role) {
    return preferred;
  }
  for (const auto& p : bundle.prompts) {
    if (p.role == role) return p.id;
  }
  throw Error("bundle must contain opposing prompts");
}

}  // namespace

double CosineSimilarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  return std::clamp(a.Dot(b), -1.0, 1.0);
}

double SinglePromptScore(const EmbeddingVector& audio,
                         const EmbeddingVector& high) {
  return (CosineSimilarity(audio, high) + 1.0) / 2.0;
}

double PamFromLogits(double dot_high, double dot_low, double tau) {
  CheckTau(tau);
  const double z_high = tau * dot_high;
  const double z_low = tau * dot_low;
  const double z_max = std::max(z_high, z_low);
  const double e_high = std::exp(z_high - z_max);
  const double e_low = std::exp(z_low - z_max);
  // One of the two exponentials is exactly 1.
  const double smaller = std::min(e_high, e_low) / (e_high + e_low);
  return z_high >= z_low ? 1.0 - smaller : smaller;
}

double PamWindow(const EmbeddingVector& audio, const EmbeddingVector& high,
                 const EmbeddingVector& low, double tau) {
  return PamFromLogits(audio.Dot(high), audio.Dot(low), tau);
}

double PamAvgSim(const EmbeddingVector& audio,
                 std::span<const EmbeddingVector> highs,
                 std::span<const EmbeddingVector> lows, double tau) {
  if (highs.empty() || lows.empty()) {
    throw Error("pam_avg_sim needs at least one high and one low prompt");
  }
  double high_sum = 0.0;
  for (const auto& u : highs) high_sum += audio.Dot(u);
  double low_sum = 0.0;
  for (const auto& u : lows) low_sum += audio.Dot(u);
  return PamFromLogits(high_sum / static_cast<double>(highs.size()),
                       low_sum / static_cast<double>(lows.size()), tau);
}

double PamAvgPairs(const EmbeddingVector& audio,
                   std::span<const PromptPair> pairs, double tau) {
  if (pairs.empty()) throw Error("pam_avg_pairs needs at least one prompt pair");
  double sum = 0.0;
  for (const auto& pair : pairs) sum += PamWindow(audio, pair.high, pair.low, tau);
  return sum / static_cast<double>(pairs.size());
}

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kSingle: return "single";
    case Strategy::kPam: return "pam";
    case Strategy::kAvgSim: return "avg_sim";
    case Strategy::kAvgPairs: return "avg_pairs";
  }
  return "unknown";
}

Strategy ParseStrategy(std::string_view name) {
  if (name == "single") return Strategy::kSingle;
  if (name == "pam") return Strategy::kPam;
  if (name == "avg_sim") return Strategy::kAvgSim;
  if (name == "avg_pairs") return Strategy::kAvgPairs;
  throw Error("unknown strategy '" + std::string(name) +
              "' (expected single, pam, avg_sim or avg_pairs)");
}

double ResolveTau(const PromptBundle& bundle, const ScoringConfig& config) {
  double tau = 1.0;
  if (config.tau_override) {
    tau = *config.tau_override;
  } else if (config.use_bundle_tau && bundle.logit_scale) {
    tau = *bundle.logit_scale;
  }
  CheckTau(tau);
  return tau;
}

PromptSelection::PromptSelection(const PromptBundle& bundle,
                                 const ScoringConfig& config)
    : strategy_(config.strategy), tau_(ResolveTau(bundle, config)) {
  switch (strategy_) {
    case Strategy::kSingle:
    case Strategy::kPam: {
      if (config.high_ids.size() > 1 || config.low_ids.size() > 1) {
        throw Error("strategy " + std::string(StrategyName(strategy_)) +
                    " takes one high and one low prompt id");
      }
      const std::string high = config.high_ids.empty()
                                   ? DefaultId(bundle, "h1", PromptRole::kHigh)
                                   : config.high_ids.front();
      highs_.push_back(RoleChecked(bundle, high, PromptRole::kHigh));
      ids_.push_back(high);
      if (strategy_ == Strategy::kPam) {
        const std::string low = config.low_ids.empty()
                                    ? DefaultId(bundle, "b1", PromptRole::kLow)
                                    : config.low_ids.front();
        lows_.push_back(RoleChecked(bundle, low, PromptRole::kLow));
        ids_.push_back(low);
      }
      break;
    }
    case Strategy::kAvgSim: {
      const std::vector<std::string> highs =
          config.high_ids.empty() ? std::vector<std::string>{"h1", "h2"} : config.high_ids;
      const std::vector<std::string> lows =
          config.low_ids.empty() ? std::vector<std::string>{"b1", "b2"} : config.low_ids;
      for (const auto& id : highs) {
        highs_.push_back(RoleChecked(bundle, id, PromptRole::kHigh));
        ids_.push_back(id);
      }
      for (const auto& id : lows) {
        lows_.push_back(RoleChecked(bundle, id, PromptRole::kLow));
        ids_.push_back(id);
      }
      break;
    }
    case Strategy::kAvgPairs: {
      const std::vector<std::pair<std::string, std::string>> pairs =
          config.pairs.empty()
              ? std::vector<std::pair<std::string, std::string>>{{"h1", "b2"}, {"h2", "b1"}}
              : config.pairs;
      for (const auto& [high, low] : pairs) {
        pairs_.push_back({RoleChecked(bundle, high, PromptRole::kHigh),
                          RoleChecked(bundle, low, PromptRole::kLow)});
        ids_.push_back(high);
        ids_.push_back(low);
      }
      break;
    }
  }
}

double PromptSelection::Score(const EmbeddingVector& audio) const {
  switch (strategy_) {
    case Strategy::kSingle: return SinglePromptScore(audio, highs_.front());
    case Strategy::kPam: return PamWindow(audio, highs_.front(), lows_.front(), tau_);
    case Strategy::kAvgSim: return PamAvgSim(audio, highs_, lows_, tau_);
    case Strategy::kAvgPairs: return PamAvgPairs(audio, pairs_, tau_);
  }
  throw Error("unknown strategy");
}

PamResult ScoreClip(const EmbeddingBackend& backend, const PromptBundle& bundle,
                    const AudioClip& clip, const ScoringConfig& config,
                    std::string_view source) {
  const PromptSelection selection(bundle, config);
  const AudioConfig& cfg = backend.audio_config();
  if (config.window_seconds > 0.0 && config.window_seconds != cfg.window_seconds) {
    throw Error("window_seconds differs from the backend's encoder window");
  }
  const double window = cfg.window_seconds;
  const double hop = config.hop_seconds > 0.0 ? config.hop_seconds : window;

  const AudioClip resampled = Resample(clip, cfg.sample_rate_hz);
  const auto windows = WindowClip(resampled, window, hop);

  PamResult result;
  result.strategy = selection.strategy();
  result.prompt_ids_used = selection.ids();
  result.tau_used = selection.tau();
  result.per_window.reserve(windows.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const EmbeddingVector v =
        backend.Embed(windows[i], WindowOrigin{std::string(source), i});
    const double score = selection.Score(v);
    result.per_window.push_back(score);
    sum += score;
  }
  result.pam = sum / static_cast<double>(result.per_window.size());
  return result;
}

std::vector<BatchItem> ScoreBatch(const EmbeddingBackend& backend,
                                  const PromptBundle& bundle,
                                  std::span<const std::filesystem::path> paths,
                                  const ScoringConfig& config,
                                  std::size_t parallelism) {
  // Fail fast on configuration problems rather than once per file.
  PromptSelection(bundle, config);
  std::vector<BatchItem> items(paths.size());
  ParallelFor(paths.size(), parallelism, [&](std::size_t i) {
    items[i].path = paths[i];
    try {
      const AudioClip clip = LoadWav(paths[i]);
      items[i].result = ScoreClip(backend, bundle, clip, config, paths[i].string());
    } catch (const std::exception& e) {
      items[i].error = e.what();
    }
  });
  return items;
}

}  // namespace pamkit
