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

// Synthetic data with known structure: raw files in each dataset's layout,
// scenario pools whose signal accuracies are placed on chosen bins, and a
// planted-rate dataset for checking stump honesty.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "escalate/dataset.hpp"
#include "escalate/stump.hpp"

namespace escalate {

// Writes a raw dataset in the layout its default manifest expects: a CSV
// file for tabular kinds, or a directory with ratings.csv and movies.csv
// for MovieLens (rows = number of users). Labels follow fixed planted
// relationships with the signal features. Throws IoError.
void write_synthetic_dataset(DatasetKind kind, const std::filesystem::path& out,
                             std::size_t rows, std::uint64_t seed);

// Plausible features for one scenario of the given kind.
FeatureMap random_features(DatasetKind kind, std::uint64_t seed);

struct PoolSpec {
  std::vector<DatasetKind> kinds = {kAllDatasetKinds.begin(), kAllDatasetKinds.end()};
  // Signal accuracies are integer percentages drawn uniformly within each
  // bin of [low, high).
  double low = 0.5;
  double high = 1.0;
  double bin_width = 0.05;
  std::size_t per_bin = 250;
  std::uint64_t seed = 0;
};

// per_bin scenarios for every bin, cycling through kinds. Each label agrees
// with its signal's majority label with probability equal to the accuracy.
std::vector<SignaledScenario> synthetic_pool(const PoolSpec& spec);

// One scenario per listed accuracy (displayed exactly as round(100 p)).
std::vector<SignaledScenario> pool_with_accuracies(std::span<const double> accuracies,
                                                   DatasetKind kind, std::uint64_t seed);

// LendingClub rows whose FICO score is >= threshold with probability 1/2;
// approval rate is rate_above above the threshold and rate_below below it.
std::vector<Scenario> planted_rate_scenarios(std::size_t rows, double threshold,
                                             double rate_above, double rate_below,
                                             std::uint64_t seed);

}  // namespace escalate
