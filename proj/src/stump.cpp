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

#include "escalate/stump.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "escalate/error.hpp"
#include "escalate/rng.hpp"

namespace escalate {
namespace {

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

bool all_integral(const std::vector<double>& values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return v == std::floor(v); });
}

// Linear-interpolation quantile of sorted values, q in [0, 1].
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::string feature_as_text(const FeatureValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return fmt::format("{:g}", std::get<double>(v));
}

std::string render_condition(const Stump& stump, DatasetKind kind) {
  const FeatureDescriptor* desc = traits(kind).feature(stump.feature_name);
  const std::string phrase =
      desc ? std::string(desc->phrase) : fmt::format("the feature '{}'", stump.feature_name);
  if (const auto* num = std::get_if<NumericSplit>(&stump.predicate)) {
    const NumberStyle style = desc ? desc->style : NumberStyle::Rating2;
    std::string value = format_number(num->threshold, style);
    if (style == NumberStyle::Rating2 && num->threshold == std::floor(num->threshold)) {
      value = format_number(num->threshold, NumberStyle::Integer);
    }
    return fmt::format("{} is {} {}", phrase, num->at_least ? "at least" : "below", value);
  }
  const auto& cat = std::get<CategoricalSplit>(stump.predicate);
  if (cat.values.size() == 1) return fmt::format("{} is {}", phrase, cat.values.front());
  return fmt::format("{} is one of {}", phrase, fmt::join(cat.values, ", "));
}


}  // namespace

bool Stump::matches(const FeatureMap& features) const {
  auto it = features.find(feature_name);
  if (it == features.end()) return false;
  if (const auto* num = std::get_if<NumericSplit>(&predicate)) {
    const double* v = std::get_if<double>(&it->second);
    if (!v) return false;
    return num->at_least ? *v >= num->threshold : *v < num->threshold;
  }
  const auto& cat = std::get<CategoricalSplit>(predicate);
  const std::string text = feature_as_text(it->second);
  return std::find(cat.values.begin(), cat.values.end(), text) != cat.values.end();
}

int displayed_percent(double accuracy) {
  return static_cast<int>(std::lround(100.0 * accuracy));
}

int Signal::percent() const { return displayed_percent(accuracy); }

std::string render_signal(const Stump& stump, DatasetKind kind) {
  const auto& t = traits(kind);
  return fmt::format("A decision tree trained on this dataset finds that when {}, {}% {}.",
                     render_condition(stump, kind), displayed_percent(stump.leaf_accuracy),
                     t.outcome[stump.majority_label]);
}

Signal make_signal(const Stump& stump, DatasetKind kind) {
  return Signal{stump, stump.leaf_accuracy, render_signal(stump, kind)};
}

int threshold_decimals(NumberStyle style) {
  switch (style) {
    case NumberStyle::Integer:
    case NumberStyle::Currency:
      return 0;
    case NumberStyle::Decimal1:
    case NumberStyle::Percent1:
      return 1;
    case NumberStyle::Rating2:
      return 2;
  }
  return 2;
}

StumpTrainingResult train_stump(std::span<const Scenario> scenarios,
                                std::string_view feature_name,
                                const SplitCandidates& candidates,
                                const StumpOptions& options) {
  if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie strictly between 0 and 1");
  }
  StumpTrainingResult result;
  if (scenarios.empty()) {
    result.diagnostics.push_back("no rows to train on");
    return result;
  }
  if (scenarios.front().features.find(feature_name) == scenarios.front().features.end()) {
    throw ConfigError(fmt::format("feature '{}' is not present", feature_name));
  }

  std::vector<std::size_t> order(scenarios.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const auto n_train = static_cast<std::size_t>(
      std::llround(options.train_fraction * static_cast<double>(order.size())));
  const std::span<const std::size_t> train(order.data(), n_train);
  const std::span<const std::size_t> held(order.data() + n_train, order.size() - n_train);

  std::vector<SplitPredicate> leaves;
  if (std::holds_alternative<CategoryCandidates>(candidates)) {
    std::set<std::string> seen;
    for (std::size_t i : train) {
      auto it = scenarios[i].features.find(feature_name);
      if (it != scenarios[i].features.end()) seen.insert(feature_as_text(it->second));
    }
    for (const auto& v : seen) leaves.push_back(CategoricalSplit{{v}});
  } else {
    std::vector<double> values;
    values.reserve(train.size());
    for (std::size_t i : train) values.push_back(numeric_feature(scenarios[i].features, feature_name));
    std::sort(values.begin(), values.end());

    std::vector<double> thresholds;
    if (const auto* q = std::get_if<QuantileCandidates>(&candidates)) {
      const int decimals = q->decimals >= 0 ? q->decimals : (all_integral(values) ? 0 : 2);
      for (int k = 1; k < q->count; ++k) {
        thresholds.push_back(round_to(quantile(values, static_cast<double>(k) / q->count), decimals));
      }
    } else {
      thresholds = std::get<ThresholdCandidates>(candidates).thresholds;
    }
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    for (double t : thresholds) {
      // Both sides must be populated in the training rows for t to split.
      if (values.empty() || !(values.front() < t) || !(values.back() >= t)) continue;
      leaves.push_back(NumericSplit{t, false});
      leaves.push_back(NumericSplit{t, true});
    }
  }
  if (leaves.empty()) {
    result.diagnostics.push_back(
        fmt::format("feature '{}' has no candidate split (constant feature?)", feature_name));
    return result;
  }

  std::size_t too_small = 0;
  std::size_t below_half = 0;
  for (const auto& predicate : leaves) {
    Stump stump{std::string(feature_name), predicate, 1, 0.0, 0};
    std::array<std::size_t, 2> train_counts{0, 0};
    for (std::size_t i : train) {
      if (stump.matches(scenarios[i].features)) ++train_counts[scenarios[i].label];
    }
    if (train_counts[0] + train_counts[1] == 0) continue;
    stump.majority_label = train_counts[1] >= train_counts[0] ? 1 : 0;

    std::size_t hits = 0;
    for (std::size_t i : held) {
      if (!stump.matches(scenarios[i].features)) continue;
      ++stump.support;
      if (scenarios[i].label == stump.majority_label) ++hits;
    }
    if (stump.support < options.min_support || stump.support == 0) {
      ++too_small;
      continue;
    }
    stump.leaf_accuracy = static_cast<double>(hits) / static_cast<double>(stump.support);
    if (stump.leaf_accuracy < 0.5) {
      ++below_half;
      continue;
    }
    result.stumps.push_back(std::move(stump));
  }
  if (too_small > 0) {
    result.diagnostics.push_back(fmt::format(
        "{} leaf/leaves of '{}' below min_support {}", too_small, feature_name,
        options.min_support));
  }
  if (below_half > 0) {
    result.diagnostics.push_back(fmt::format(
        "{} leaf/leaves of '{}' dropped: training majority lost on held-out rows",
        below_half, feature_name));
  }
  if (result.stumps.empty()) {
    result.diagnostics.push_back(
        fmt::format("no split of '{}' met min_support {}", feature_name, options.min_support));
  }
  return result;
}

void order_by_specificity(std::vector<Stump>& stumps) {
  auto key_threshold = [](const Stump& s) {
    if (const auto* n = std::get_if<NumericSplit>(&s.predicate)) return n->threshold;
    return 0.0;
  };
  auto key_side = [](const Stump& s) {
    if (const auto* n = std::get_if<NumericSplit>(&s.predicate)) return n->at_least ? 1 : 0;
    return 2;
  };
  std::stable_sort(stumps.begin(), stumps.end(), [&](const Stump& a, const Stump& b) {
    if (a.support != b.support) return a.support < b.support;
    if (a.feature_name != b.feature_name) return a.feature_name < b.feature_name;
    if (key_threshold(a) != key_threshold(b)) return key_threshold(a) < key_threshold(b);
    return key_side(a) < key_side(b);
  });
}

SignalAssignment assign_signal(const Scenario& scenario, std::span<const Stump> stumps) {
  std::optional<std::size_t> first;
  std::size_t matches = 0;
  for (std::size_t i = 0; i < stumps.size(); ++i) {
    if (!stumps[i].matches(scenario.features)) continue;
    ++matches;
    if (!first) first = i;
  }
  if (!first) {
    throw AssignmentError(fmt::format("no stump matches scenario '{}'", scenario.id));
  }
  return {make_signal(stumps[*first], scenario.kind), *first, matches};
}

AccuracyBins::AccuracyBins(double width) : width_(width), count_(0) {
  if (!(width > 0.0 && width <= 0.5)) throw ConfigError("bin width must lie in (0, 0.5]");
  const double n = 0.5 / width;
  if (std::abs(n - std::round(n)) > 1e-9) {
    throw ConfigError(fmt::format("bin width {} does not divide [0.5, 1.0] evenly", width));
  }
  count_ = static_cast<std::size_t>(std::llround(n));
}

double AccuracyBins::lower(std::size_t i) const { return 0.5 + static_cast<double>(i) * width_; }
double AccuracyBins::upper(std::size_t i) const { return lower(i) + width_; }
double AccuracyBins::center(std::size_t i) const { return lower(i) + 0.5 * width_; }

std::size_t AccuracyBins::index_of(double p) const {
  if (!(p >= 0.5 && p <= 1.0)) {
    throw ConstraintViolation(fmt::format("accuracy {} lies outside [0.5, 1]", p));
  }
  // The epsilon keeps values such as 0.9 from landing one bin low.
  const auto k = static_cast<std::size_t>(std::floor((p - 0.5) / width_ + 1e-9));
  return std::min(k, count_ - 1);
}

std::vector<SignalBucket> bin_by_accuracy(std::span<const Signal> signals, double bin_width) {
  const AccuracyBins bins(bin_width);
  std::vector<SignalBucket> buckets(bins.count());
  for (std::size_t i = 0; i < bins.count(); ++i) {
    buckets[i].lower = bins.lower(i);
    buckets[i].upper = bins.upper(i);
  }
  for (const auto& s : signals) buckets[bins.index_of(s.accuracy)].signals.push_back(s);
  return buckets;
}

}  // namespace escalate
