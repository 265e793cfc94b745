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

#include "escalate/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "escalate/error.hpp"
#include "escalate/stump.hpp"

namespace escalate {

EscalationCurve escalation_curve(std::span<const TrialRecord> records, double bin_width) {
  const AccuracyBins bins(bin_width);
  struct Tally {
    std::size_t n = 0;
    std::size_t escalated = 0;
    double accuracy_sum = 0.0;
  };
  std::vector<Tally> tally(bins.count());
  EscalationCurve curve;
  curve.bin_width = bin_width;
  for (const auto& r : records) {
    if (!r.signal_accuracy) {
      ++curve.excluded_no_signal;
      continue;
    }
    const auto d = r.decided();
    if (!d) {
      ++curve.excluded_failures;
      continue;
    }
    Tally& t = tally[bins.index_of(*r.signal_accuracy)];
    ++t.n;
    t.accuracy_sum += *r.signal_accuracy;
    if (*d == Decision::Escalate) ++t.escalated;
  }
  for (std::size_t i = 0; i < bins.count(); ++i) {
    const Tally& t = tally[i];
    if (t.n == 0) {
      curve.empty_bins.push_back(bins.center(i));
      continue;
    }
    CurvePoint p;
    p.accuracy_bin_center = bins.center(i);
    p.mean_accuracy = t.accuracy_sum / static_cast<double>(t.n);
    p.n = t.n;
    p.escalation_rate = static_cast<double>(t.escalated) / static_cast<double>(t.n);
    p.standard_error = std::sqrt(p.escalation_rate * (1.0 - p.escalation_rate) / t.n);
    curve.points.push_back(p);
  }
  return curve;
}

std::string_view to_string(FitWeighting w) {
  return w == FitWeighting::ByCount ? "n-weighted" : "unweighted";
}

LinearFit fit_line(std::span<const AccuracyRate> pairs, FitWeighting weighting) {
  if (pairs.size() < 2) throw ConstraintViolation("a line fit needs at least two pairs");
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (const auto& p : pairs) {
    const double w = weighting == FitWeighting::ByCount ? p.weight : 1.0;
    if (!(w > 0.0)) throw ConstraintViolation("fit weights must be positive");
    sw += w;
    sx += w * p.accuracy;
    sy += w * p.escalation_rate;
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : pairs) {
    const double w = weighting == FitWeighting::ByCount ? p.weight : 1.0;
    sxx += w * (p.accuracy - mx) * (p.accuracy - mx);
    sxy += w * (p.accuracy - mx) * (p.escalation_rate - my);
  }
  if (!(sxx > 0.0)) {
    throw DegenerateFitError("all accuracies are identical; the slope is undefined");
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.n = pairs.size();
  fit.weighting = weighting;
  for (const auto& p : pairs) {
    const double e = p.escalation_rate - fit.at(p.accuracy);
    fit.residual_sum_squares += e * e;
  }
  return fit;
}

std::string ImplicitThreshold::display() const {
  if (ill_posed || !value) return "ill-posed";
  if (*value > 1.0) return "greater than 100%";
  return fmt::format("{:.1f}%", 100.0 * *value);
}

ImplicitThreshold fit_implicit_threshold(std::span<const AccuracyRate> pairs,
                                         FitWeighting weighting) {
  ImplicitThreshold t;
  t.fit = fit_line(pairs, weighting);
  if (t.fit.slope >= 0.0) {
    t.ill_posed = true;
  } else {
    t.value = (0.5 - t.fit.intercept) / t.fit.slope;
  }
  return t;
}

ImplicitThreshold fit_implicit_threshold(const EscalationCurve& curve, FitWeighting weighting) {
  std::vector<AccuracyRate> pairs;
  for (const auto& p : curve.points) {
    pairs.push_back({p.mean_accuracy, p.escalation_rate, static_cast<double>(p.n)});
  }
  return fit_implicit_threshold(pairs, weighting);
}

SelfEstimate self_estimated_accuracy(const LinearFit& fit, double no_signal_rate) {
  if (!(no_signal_rate >= 0.0 && no_signal_rate <= 1.0)) {
    throw ConstraintViolation("no-signal escalation rate must lie in [0, 1]");
  }
  SelfEstimate s;
  if (!(fit.slope < 0.0)) {
    s.unclamped = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.unclamped = (no_signal_rate - fit.intercept) / fit.slope;
  const double v = std::clamp(s.unclamped, 0.0, 1.0);
  s.clamped = v != s.unclamped;
  s.value = v;
  return s;
}

double escalation_rate(std::span<const TrialRecord> records) {
  std::size_t n = 0, esc = 0;
  for (const auto& r : records) {
    if (auto d = r.decided()) {
      ++n;
      if (*d == Decision::Escalate) ++esc;
    }
  }
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(esc) / static_cast<double>(n);
}

double prediction_accuracy_rate(std::span<const TrialRecord> records) {
  std::size_t n = 0, ok = 0;
  for (const auto& r : records) {
    if (r.prediction_correct) {
      ++n;
      if (*r.prediction_correct) ++ok;
    }
  }
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(ok) / static_cast<double>(n);
}

std::optional<double> CharacterizationReport::calibration_gap() const {
  if (!self_estimate.value) return std::nullopt;
  return *self_estimate.value - actual_accuracy;
}

std::optional<bool> CharacterizationReport::overconfident() const {
  if (!self_estimate.value) return std::nullopt;
  return *self_estimate.value > actual_accuracy;
}

CharacterizationReport make_report(std::string agent_id, std::string scope,
                                   const ImplicitThreshold& threshold, double no_signal_rate,
                                   double actual_accuracy) {
  CharacterizationReport r;
  r.agent_id = std::move(agent_id);
  r.scope = std::move(scope);
  r.implicit_threshold = threshold;
  r.no_signal_rate = no_signal_rate;
  r.actual_accuracy = actual_accuracy;
  r.self_estimate = self_estimated_accuracy(threshold.fit, no_signal_rate);
  return r;
}

CalibrationSummary calibration_summary(std::span<const CharacterizationReport> reports) {
  CalibrationSummary s;
  for (const auto& r : reports) {
    const auto gap = r.calibration_gap();
    if (!gap) {
      throw ConstraintViolation(fmt::format(
          "report for '{}' ({}) has an undefined self-estimate", r.agent_id, r.scope));
    }
    ++s.total;
    if (*gap > 0.0) ++s.overconfident;
    auto [it, fresh] = s.gap_by_agent.try_emplace(r.agent_id, GapRange{*gap, *gap});
    if (!fresh) {
      it->second.min = std::min(it->second.min, *gap);
      it->second.max = std::max(it->second.max, *gap);
    }
  }
  s.fraction = s.total == 0 ? 0.0 : static_cast<double>(s.overconfident) / s.total;
  return s;
}

double score_policy(std::span<const TrialRecord> records, const CostModel& cost) {
  if (records.empty()) throw ConstraintViolation("cannot score an empty record set");
  std::size_t correct = 0;
  for (const auto& r : records) {
    const auto d = r.decided();
    if (d && *d == bayes_decision(r.condition_accuracy, cost)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

}  // namespace escalate
