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

#ifndef PAMKIT_RNG_H_
#define PAMKIT_RNG_H_

#include <cstdint>
#include <optional>

namespace pamkit {

std::uint64_t SplitMix64(std::uint64_t& state);

// Stateless 64-bit mix of a key; used for counter-based random tables.
std::uint64_t HashU64(std::uint64_t key);

// xoshiro256** seeded through SplitMix64. Output is identical on every
// platform for a given seed; Gaussian() uses Box-Muller.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t Next();
  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  // Standard normal deviate.
  double Gaussian();

 private:
  std::uint64_t s_[4];
  std::optional<double> spare_;
};

}  // namespace pamkit

#endif  // PAMKIT_RNG_H_
