/*
 * Copyright 2026 The escalate Authors.
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

#pragma once

#include <cstdint>
#include <random>

namespace escalate {

// Stable 64-bit mix of (seed, stream). Used to derive per-trial and per-draw
// seeds so that adding trials never perturbs existing ones.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Seeded generator with platform-independent variate conversions.
// std::mt19937_64 is fully specified by the standard; the distribution
// adaptors in <random> are not, so uniform and normal draws are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform();

  double normal(double mean, double sd);

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n). n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace escalate
