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

#include "pamkit/embedding.h"

#include <cmath>
#include <string>

#include "pamkit/error.h"

namespace pamkit {
namespace {

template <typename T>
EmbeddingVector NormalizeImpl(std::span<const T> raw,
                              EmbeddingVector (*adopt)(std::vector<float>)) {
  if (raw.empty()) throw Error("cannot normalize an empty embedding");
  double sum_sq = 0.0;
  for (T v : raw) {
    if (!std::isfinite(v)) throw Error("embedding contains non-finite values");
    sum_sq += static_cast<double>(v) * v;
  }
  if (sum_sq == 0.0) throw Error("cannot normalize a zero embedding");
  const double inv = 1.0 / std::sqrt(sum_sq);
  std::vector<float> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = static_cast<float>(raw[i] * inv);
  }
  return adopt(std::move(out));
}

}  // namespace

EmbeddingVector EmbeddingVector::Normalized(std::span<const double> raw) {
  return NormalizeImpl(raw, &EmbeddingVector::FromUnitValues);
}

EmbeddingVector EmbeddingVector::Normalized(std::span<const float> raw) {
  return NormalizeImpl(raw, &EmbeddingVector::FromUnitValues);
}

EmbeddingVector EmbeddingVector::FromUnitValues(std::vector<float> values) {
  EmbeddingVector v(std::move(values));
  if (v.values_.empty()) throw Error("embedding has zero dimension");
  for (float x : v.values_) {
    if (!std::isfinite(x)) throw Error("embedding contains non-finite values");
  }
  const double norm = v.Norm();
  if (std::abs(norm - 1.0) > kUnitNormTolerance) {
    throw Error("embedding is not unit-norm (norm " + std::to_string(norm) + ")");
  }
  return v;
}

double EmbeddingVector::Norm() const {
  double sum_sq = 0.0;
  for (float x : values_) sum_sq += static_cast<double>(x) * x;
  return std::sqrt(sum_sq);
}

double EmbeddingVector::Dot(const EmbeddingVector& other) const {
  if (other.dim() != dim()) {
    throw Error("embedding dimension mismatch: " + std::to_string(dim()) +
                " vs " + std::to_string(other.dim()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    acc += static_cast<double>(values_[i]) * other.values_[i];
  }
  return acc;
}

}  // namespace pamkit
