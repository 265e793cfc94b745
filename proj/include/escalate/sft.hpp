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

// Chain-of-thought fine-tuning corpus: each target reads the signal's
// accuracy, computes the expected cost of implementing, R x (1 - p), and
// compares it to the unit cost of escalating.

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "escalate/dataset.hpp"
#include "escalate/decision.hpp"
#include "escalate/protocol.hpp"
#include "escalate/stump.hpp"

namespace escalate {

struct AgentSpec;

inline const std::vector<double> kSftRatios = {2, 4, 8, 10, 20, 50};

// "The signal suggests an accuracy of X%, so the error rate is Y%. The
// expected cost of implementing is R × Y% = Z, which ... 1." followed by the
// DECISION marker. X = round(100 p), Y = 100 - X, Z = R Y / 100 to two
// decimals. Escalates iff Z > 1. Throws ConstraintViolation unless R > 1.
std::string generate_target(double p, double ratio);

struct SftMeta {
  DatasetKind dataset = DatasetKind::LendingClub;
  double cost_ratio = 4.0;
  FramingVariant framing = FramingVariant::Original;
  // Accuracy as printed in the signal (integer percent / 100).
  double signal_accuracy = 0.0;
  Decision gold_decision = Decision::Implement;
  std::string scenario_id;

  bool operator==(const SftMeta&) const = default;
};

struct SftExample {
  // user, assistant (prediction), user (escalation prompt with framing).
  Transcript transcript;
  std::string target_text;
  SftMeta meta;

  bool operator==(const SftExample&) const = default;
};

using ScenarioPools = std::map<DatasetKind, std::vector<SignaledScenario>>;

struct SftGridConfig {
  std::vector<DatasetKind> datasets = {kAllDatasetKinds.begin(), kAllDatasetKinds.end()};
  std::vector<FramingVariant> framings = {std::begin(kAllFramings), std::end(kAllFramings)};
  std::vector<double> ratios = kSftRatios;
  std::set<DatasetKind> holdout = {DatasetKind::MovieLens};
  std::size_t per_cell = 50;
  std::uint64_t seed = 0;
};

// Cross product of non-holdout datasets x framings x ratios, per_cell
// examples each, scenarios drawn with replacement from each dataset's pool.
// Throws ConfigError for an empty grid, a holdout outside the datasets, or
// a missing pool.
std::vector<SftExample> generate_training_set(const ScenarioPools& pools,
                                              const SftGridConfig& config);

void write_corpus(std::span<const SftExample> corpus, const std::string& path);
std::vector<SftExample> read_corpus(const std::string& path);

struct EvalGrid {
  std::vector<DatasetKind> datasets = {kAllDatasetKinds.begin(), kAllDatasetKinds.end()};
  // The evaluation table has three framing columns; add Fourth to widen it.
  std::vector<FramingVariant> framings = {FramingVariant::Original, FramingVariant::Dollar,
                                          FramingVariant::Wording};
  std::vector<double> ratios = kSftRatios;
  std::size_t samples_per_ratio = 50;
  std::uint64_t seed = 0;
  // Datasets marked "Yes" in the Trained? column.
  std::set<DatasetKind> trained = {DatasetKind::HotelBookings, DatasetKind::LendingClub,
                                   DatasetKind::WikipediaToxicity};
};

struct RuleFollowerCell {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

struct RuleFollowerTable {
  std::vector<DatasetKind> datasets;
  std::vector<FramingVariant> framings;
  std::map<std::pair<DatasetKind, FramingVariant>, RuleFollowerCell> cells;
  // Per (dataset, R) accuracy pooled over framings.
  std::map<std::pair<DatasetKind, double>, RuleFollowerCell> by_ratio;
  std::set<DatasetKind> trained;
  bool signal_present = true;
};

// Runs samples_per_ratio trials per (dataset, framing, R) and scores each
// against the cost-optimal rule at that R. signal_present = false is the
// no-signal ablation; trial failures count as errors.
RuleFollowerTable evaluate_rule_follower(const AgentSpec& agent, const ScenarioPools& pools,
                                         const EvalGrid& grid, bool signal_present);

// Header: Dataset,<framing...>,Trained? with one row per dataset.
void write_rule_follower_csv(const RuleFollowerTable& table, const std::string& path);

}  // namespace escalate
