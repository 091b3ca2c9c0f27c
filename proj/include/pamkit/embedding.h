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

#ifndef PAMKIT_EMBEDDING_H_
#define PAMKIT_EMBEDDING_H_

#include <cstddef>
#include <span>
#include <vector>

namespace pamkit {

inline constexpr double kUnitNormTolerance = 1e-6;

// Unit-norm vector in the joint audio/text space. Stored as float32, the
// precision embeddings are shipped and computed in; norms and dot products
// accumulate in double.
class EmbeddingVector {
 public:
  // Scales `raw` to unit L2 norm. Throws on a zero or non-finite vector.
  static EmbeddingVector Normalized(std::span<const double> raw);
  static EmbeddingVector Normalized(std::span<const float> raw);
  // Adopts values that must already be unit-norm within kUnitNormTolerance.
  static EmbeddingVector FromUnitValues(std::vector<float> values);

  std::span<const float> values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  double Norm() const;
  // Throws on dimension mismatch.
  double Dot(const EmbeddingVector& other) const;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  explicit EmbeddingVector(std::vector<float> values)
      : values_(std::move(values)) {}
  std::vector<float> values_;
};

}  // namespace pamkit

#endif  // PAMKIT_EMBEDDING_H_
