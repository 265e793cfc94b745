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

// Escalation curves, the implicit threshold p*, self-estimated accuracy and
// policy scoring.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "escalate/decision.hpp"
#include "escalate/runner.hpp"

namespace escalate {

struct CurvePoint {
  double accuracy_bin_center = 0.0;
  // Mean accuracy of the bin's records; the regression uses this as x so
  // that point-mass signals are not shifted to the bin center.
  double mean_accuracy = 0.0;
  double escalation_rate = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
};

struct EscalationCurve {
  std::vector<CurvePoint> points;
  double bin_width = 0.05;
  // Records left out: unparsed decisions, and records without a signal.
  std::size_t excluded_failures = 0;
  std::size_t excluded_no_signal = 0;
  // Centers of bins with no records.
  std::vector<double> empty_bins;
};

// Groups signal-present records by accuracy bin. SE = sqrt(r (1 - r) / n).
EscalationCurve escalation_curve(std::span<const TrialRecord> records, double bin_width = 0.05);

enum class FitWeighting { Unweighted, ByCount };

std::string_view to_string(FitWeighting w);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double residual_sum_squares = 0.0;
  std::size_t n = 0;
  FitWeighting weighting = FitWeighting::Unweighted;

  double at(double x) const { return intercept + slope * x; }
};

struct AccuracyRate {
  double accuracy = 0.0;
  double escalation_rate = 0.0;
  double weight = 1.0;
};

// Least squares on centered sums. Throws ConstraintViolation for fewer than
// two pairs or nonpositive weights, DegenerateFitError when every accuracy is
// the same.
LinearFit fit_line(std::span<const AccuracyRate> pairs,
                   FitWeighting weighting = FitWeighting::Unweighted);

class DegenerateFitError : public ConstraintViolation {
 public:
  using ConstraintViolation::ConstraintViolation;
};

struct ImplicitThreshold {
  LinearFit fit;
  // (0.5 - a) / b; empty when the fit is ill-posed.
  std::optional<double> value;
  bool ill_posed = false;

  // "ill-posed", "greater than 100%", or the percentage to one decimal.
  std::string display() const;
};

ImplicitThreshold fit_implicit_threshold(std::span<const AccuracyRate> pairs,
                                         FitWeighting weighting = FitWeighting::Unweighted);

ImplicitThreshold fit_implicit_threshold(const EscalationCurve& curve,
                                         FitWeighting weighting = FitWeighting::Unweighted);

struct SelfEstimate {
  std::optional<double> value;
  // Before clamping to [0, 1]; NaN when undefined.
  double unclamped = 0.0;
  bool clamped = false;

  bool defined() const { return value.has_value(); }
};

// Inverts the fit at the no-signal escalation rate. Undefined when b >= 0.
SelfEstimate self_estimated_accuracy(const LinearFit& fit, double no_signal_rate);

// Fraction of decisions that escalate, ignoring unparsed ones. NaN if none.
double escalation_rate(std::span<const TrialRecord> records);

// Fraction of parsed predictions that were correct. NaN if none.
double prediction_accuracy_rate(std::span<const TrialRecord> records);

struct CharacterizationReport {
  std::string agent_id;
  std::string scope;  // "pooled" or a dataset name
  ImplicitThreshold implicit_threshold;
  SelfEstimate self_estimate;
  double no_signal_rate = 0.0;
  double actual_accuracy = 0.0;

  std::optional<double> calibration_gap() const;
  std::optional<bool> overconfident() const;
};

CharacterizationReport make_report(std::string agent_id, std::string scope,
                                   const ImplicitThreshold& threshold, double no_signal_rate,
                                   double actual_accuracy);

struct GapRange {
  double min = 0.0;
  double max = 0.0;
};

struct CalibrationSummary {
  std::size_t overconfident = 0;
  std::size_t total = 0;
  double fraction = 0.0;
  std::map<std::string, GapRange> gap_by_agent;
};

// Throws ConstraintViolation if any report has an undefined self-estimate.
CalibrationSummary calibration_summary(std::span<const CharacterizationReport> reports);

// Fraction of records whose decision equals bayes_decision at the record's
// condition accuracy. Unparsed decisions count as wrong. Throws
// ConstraintViolation for an empty set.
double score_policy(std::span<const TrialRecord> records, const CostModel& cost);

}  // namespace escalate
