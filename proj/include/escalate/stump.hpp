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

// Depth-1 decision stumps and the accuracy signals rendered from them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "escalate/dataset.hpp"

namespace escalate {

// feature >= threshold when at_least, feature < threshold otherwise.
struct NumericSplit {
  double threshold = 0.0;
  bool at_least = true;

  bool operator==(const NumericSplit&) const = default;
};

// feature is one of values.
struct CategoricalSplit {
  std::vector<std::string> values;

  bool operator==(const CategoricalSplit&) const = default;
};

using SplitPredicate = std::variant<NumericSplit, CategoricalSplit>;

struct Stump {
  std::string feature_name;
  SplitPredicate predicate;
  int majority_label = 1;
  // Held-out fraction of matching rows whose label equals majority_label.
  double leaf_accuracy = 0.5;
  // Held-out matching row count.
  std::size_t support = 0;

  bool matches(const FeatureMap& features) const;

  bool operator==(const Stump&) const = default;
};

struct Signal {
  Stump stump;
  double accuracy = 0.5;
  std::string rendered_sentence;

  // Integer percentage printed in the sentence.
  int percent() const;

  // percent() / 100: the accuracy as the agent reads it.
  double displayed_accuracy() const { return percent() / 100.0; }

  bool operator==(const Signal&) const = default;
};

// round(100 * accuracy).
int displayed_percent(double accuracy);

// "A decision tree trained on this dataset finds that when <condition>,
// <N>% <outcome>."
std::string render_signal(const Stump& stump, DatasetKind kind);

Signal make_signal(const Stump& stump, DatasetKind kind);

// Interior quantiles of the training values: count = 10 gives deciles.
// Thresholds are rounded to `decimals` places; a negative value picks 0 for
// integer-valued features and 2 otherwise.
struct QuantileCandidates {
  int count = 10;
  int decimals = -1;
};

struct ThresholdCandidates {
  std::vector<double> thresholds;
};

// One single-value leaf per category observed in the training rows.
struct CategoryCandidates {};

using SplitCandidates =
    std::variant<QuantileCandidates, ThresholdCandidates, CategoryCandidates>;

struct StumpOptions {
  double train_fraction = 0.7;
  std::size_t min_support = 200;
  std::uint64_t seed = 0;
};

struct StumpTrainingResult {
  std::vector<Stump> stumps;
  std::vector<std::string> diagnostics;
};

// Splits rows into train and held-out partitions by seed, takes each leaf's
// majority label from the training rows and measures its accuracy on the
// held-out rows only. Leaves below min_support, or whose held-out accuracy
// falls under 0.5, are dropped with a diagnostic.
StumpTrainingResult train_stump(std::span<const Scenario> scenarios,
                                std::string_view feature_name,
                                const SplitCandidates& candidates,
                                const StumpOptions& options);

// Decimal places used for thresholds of a feature shown in `style`.
int threshold_decimals(NumberStyle style);

// Most specific stumps first: ascending support, then feature name, then
// threshold. This is the fixed ordering assign_signal walks.
void order_by_specificity(std::vector<Stump>& stumps);

struct SignalAssignment {
  Signal signal;
  std::size_t stump_index = 0;
  // Number of stumps that matched; > 1 means the ordering broke a tie.
  std::size_t match_count = 0;
};

class AssignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// First matching stump in the given order. Throws AssignmentError when none
// matches.
SignalAssignment assign_signal(const Scenario& scenario, std::span<const Stump> stumps);

struct SignaledScenario {
  Scenario scenario;
  Signal signal;

  bool operator==(const SignaledScenario&) const = default;
};

// Half-open bins [0.5 + k w, 0.5 + (k + 1) w) over [0.5, 1.0]; the last bin
// also holds 1.0.
class AccuracyBins {
 public:
  // Throws ConfigError unless width divides 0.5 evenly.
  explicit AccuracyBins(double width);

  std::size_t count() const { return count_; }
  double width() const { return width_; }
  double lower(std::size_t i) const;
  double upper(std::size_t i) const;
  double center(std::size_t i) const;

  // Throws ConstraintViolation for p outside [0.5, 1].
  std::size_t index_of(double p) const;

 private:
  double width_;
  std::size_t count_;
};

struct SignalBucket {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<Signal> signals;
};

// One bucket per bin, empty bins included, ascending.
std::vector<SignalBucket> bin_by_accuracy(std::span<const Signal> signals, double bin_width);

}  // namespace escalate
