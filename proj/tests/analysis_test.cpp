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

#include <gtest/gtest.h>

#include <cmath>

#include "escalate/rng.hpp"

namespace escalate {
namespace {

TrialRecord rec(double p, std::optional<Decision> d, bool signal = true) {
  TrialRecord r;
  r.condition = signal ? ConditionConfig::baseline() : ConditionConfig::no_signal();
  r.condition_accuracy = p;
  if (signal) r.signal_accuracy = p;
  r.prediction = 1;
  r.prediction_correct = true;
  if (d) {
    r.decision = *d;
  } else {
    r.decision = ParseFailure{"no marker"};
  }
  return r;
}

std::vector<TrialRecord> bin_of(double p, int n, int escalated) {
  std::vector<TrialRecord> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(rec(p, i < escalated ? Decision::Escalate : Decision::Implement));
  }
  return out;
}

TEST(EscalationCurve, RateAndStandardError) {
  auto recs = bin_of(0.62, 100, 75);
  const auto curve = escalation_curve(recs);
  ASSERT_EQ(curve.points.size(), 1u);
  const auto& pt = curve.points[0];
  EXPECT_DOUBLE_EQ(pt.accuracy_bin_center, 0.625);
  EXPECT_NEAR(pt.mean_accuracy, 0.62, 1e-12);
  EXPECT_DOUBLE_EQ(pt.escalation_rate, 0.75);
  EXPECT_NEAR(pt.standard_error, 0.0433, 5e-5);
  EXPECT_EQ(curve.empty_bins.size(), 9u);
}

TEST(EscalationCurve, StandardErrorMatchesBootstrap) {
  auto recs = bin_of(0.81, 200, 46);
  const double se = escalation_curve(recs).points.at(0).standard_error;
  // Resample the bin with replacement and take the spread of the rate.
  Rng rng(77);
  const int reps = 4000;
  double sum = 0.0, sq = 0.0;
  for (int b = 0; b < reps; ++b) {
    int esc = 0;
    for (int i = 0; i < 200; ++i) esc += recs[rng.below(200)].decided() == Decision::Escalate;
    const double r = esc / 200.0;
    sum += r;
    sq += r * r;
  }
  const double mean = sum / reps;
  const double boot = std::sqrt(sq / reps - mean * mean);
  EXPECT_NEAR(boot, se, 0.1 * se);
}

TEST(EscalationCurve, ExclusionsAreCounted) {
  std::vector<TrialRecord> recs = {rec(0.7, Decision::Escalate), rec(0.7, std::nullopt),
                                   rec(0.7, Decision::Implement, false)};
  const auto curve = escalation_curve(recs);
  EXPECT_EQ(curve.excluded_failures, 1u);
  EXPECT_EQ(curve.excluded_no_signal, 1u);
  EXPECT_EQ(curve.points.at(0).n, 1u);
}

// Raw-sum normal equations, a different route from the centered solver.
std::pair<double, double> normal_equations(const std::vector<AccuracyRate>& pts, bool weighted) {
  double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
  for (const auto& p : pts) {
    const double w = weighted ? p.weight : 1.0;
    s0 += w;
    s1 += w * p.accuracy;
    s2 += w * p.accuracy * p.accuracy;
    t0 += w * p.escalation_rate;
    t1 += w * p.accuracy * p.escalation_rate;
  }
  const double det = s0 * s2 - s1 * s1;
  return {(s2 * t0 - s1 * t1) / det, (s0 * t1 - s1 * t0) / det};
}

TEST(FitLine, AgreesWithNormalEquations) {
  Rng rng(3);
  std::vector<AccuracyRate> pts;
  for (int i = 0; i < 10; ++i) {
    pts.push_back({0.525 + 0.05 * i, rng.uniform(), 1.0 + static_cast<double>(rng.below(300))});
  }
  for (bool weighted : {false, true}) {
    const auto fit = fit_line(pts, weighted ? FitWeighting::ByCount : FitWeighting::Unweighted);
    const auto [a, b] = normal_equations(pts, weighted);
    EXPECT_NEAR(fit.intercept, a, 1e-9);
    EXPECT_NEAR(fit.slope, b, 1e-9);
  }
}

TEST(FitLine, Errors) {
  std::vector<AccuracyRate> one = {{0.6, 0.5}};
  EXPECT_THROW(fit_line(one), ConstraintViolation);
  std::vector<AccuracyRate> same = {{0.6, 0.5}, {0.6, 0.2}};
  EXPECT_THROW(fit_line(same), DegenerateFitError);
  std::vector<AccuracyRate> zero_w = {{0.6, 0.5, 0.0}, {0.7, 0.2, 1.0}};
  EXPECT_THROW(fit_line(zero_w, FitWeighting::ByCount), ConstraintViolation);
}

TEST(ImplicitThreshold, PlantedLineRecoversThresholdAndSelfEstimate) {
  std::vector<AccuracyRate> pts;
  for (int i = 0; i < 10; ++i) {
    const double p = 0.525 + 0.05 * i;
    pts.push_back({p, 1.625 - 1.5 * p});
  }
  const auto t = fit_implicit_threshold(pts);
  ASSERT_TRUE(t.value.has_value());
  EXPECT_NEAR(*t.value, 0.75, 1e-12);
  EXPECT_EQ(t.display(), "75.0%");
  EXPECT_NEAR(t.fit.residual_sum_squares, 0.0, 1e-20);
  const auto s = self_estimated_accuracy(t.fit, 0.5);
  ASSERT_TRUE(s.defined());
  EXPECT_NEAR(*s.value, 0.75, 1e-12);
  EXPECT_FALSE(s.clamped);
}

TEST(ImplicitThreshold, FlatOrRisingFitIsIllPosed) {
  std::vector<AccuracyRate> flat = {{0.6, 0.3}, {0.8, 0.3}};
  const auto t = fit_implicit_threshold(flat);
  EXPECT_TRUE(t.ill_posed);
  EXPECT_FALSE(t.value.has_value());
  EXPECT_EQ(t.display(), "ill-posed");
  EXPECT_FALSE(self_estimated_accuracy(t.fit, 0.3).defined());
  EXPECT_TRUE(std::isnan(self_estimated_accuracy(t.fit, 0.3).unclamped));
}

TEST(ImplicitThreshold, BeyondOneDisplaysAsGreaterThanHundred) {
  // Escalates 100% at 0.5 and 80% at 1.0: crosses 0.5 at 1.75.
  std::vector<AccuracyRate> pts = {{0.5, 1.0}, {1.0, 0.8}};
  const auto t = fit_implicit_threshold(pts);
  EXPECT_NEAR(*t.value, 1.75, 1e-12);
  EXPECT_EQ(t.display(), "greater than 100%");
}

TEST(ImplicitThreshold, CurveOverloadUsesMeanAccuracy) {
  // A step agent at 0.75 fed point masses at 0.70 and 0.80.
  std::vector<TrialRecord> recs = bin_of(0.70, 50, 50);
  for (auto& r : bin_of(0.80, 50, 0)) recs.push_back(r);
  const auto t = fit_implicit_threshold(escalation_curve(recs));
  EXPECT_NEAR(*t.value, 0.75, 1e-12);
}

TEST(SelfEstimate, ClampsOutsideUnitInterval) {
  LinearFit fit;
  fit.intercept = 0.2;
  fit.slope = -0.1;  // rate 0.5 would need p = -3
  const auto s = self_estimated_accuracy(fit, 0.5);
  EXPECT_TRUE(s.clamped);
  EXPECT_DOUBLE_EQ(*s.value, 0.0);
  EXPECT_NEAR(s.unclamped, -3.0, 1e-12);
  EXPECT_THROW(self_estimated_accuracy(fit, 1.5), ConstraintViolation);
}

CharacterizationReport report_with(std::string agent, double a_hat, double actual) {
  CharacterizationReport r;
  r.agent_id = std::move(agent);
  r.scope = "pooled";
  r.self_estimate.value = a_hat;
  r.actual_accuracy = actual;
  return r;
}

TEST(Calibration, SummaryCountsOverconfidence) {
  std::vector<CharacterizationReport> reps = {report_with("a", 0.9, 0.8),
                                              report_with("a", 0.7, 0.8),
                                              report_with("b", 0.8, 0.8),
                                              report_with("b", 0.95, 0.7)};
  const auto s = calibration_summary(reps);
  EXPECT_EQ(s.total, 4u);
  EXPECT_EQ(s.overconfident, 2u);
  EXPECT_DOUBLE_EQ(s.fraction, 0.5);
  EXPECT_NEAR(s.gap_by_agent.at("a").min, -0.1, 1e-12);
  EXPECT_NEAR(s.gap_by_agent.at("a").max, 0.1, 1e-12);
  EXPECT_NEAR(s.gap_by_agent.at("b").max, 0.25, 1e-12);

  std::vector<CharacterizationReport> none = {report_with("c", 0.6, 0.8)};
  EXPECT_DOUBLE_EQ(calibration_summary(none).fraction, 0.0);

  std::vector<CharacterizationReport> three = {report_with("a", 0.9, 0.8),
                                               report_with("a", 0.9, 0.8),
                                               report_with("a", 0.9, 0.8),
                                               report_with("a", 0.5, 0.8)};
  EXPECT_DOUBLE_EQ(calibration_summary(three).fraction, 0.75);

  reps.push_back(CharacterizationReport{});
  EXPECT_THROW(calibration_summary(reps), ConstraintViolation);
}

TEST(Report, MakeReportInvertsAtNoSignalRate) {
  std::vector<AccuracyRate> pts = {{0.5, 1.0}, {1.0, 0.0}};
  const auto t = fit_implicit_threshold(pts);
  const auto r = make_report("x", "pooled", t, 0.2, 0.7);
  ASSERT_TRUE(r.self_estimate.defined());
  EXPECT_NEAR(*r.self_estimate.value, 0.9, 1e-12);
  EXPECT_NEAR(*r.calibration_gap(), 0.2, 1e-12);
  EXPECT_TRUE(*r.overconfident());
}

TEST(Rates, IgnoreFailuresAndReturnNanWhenEmpty) {
  std::vector<TrialRecord> recs = {rec(0.7, Decision::Escalate), rec(0.7, std::nullopt),
                                   rec(0.7, Decision::Implement)};
  EXPECT_DOUBLE_EQ(escalation_rate(recs), 0.5);
  recs[0].prediction_correct = false;
  EXPECT_NEAR(prediction_accuracy_rate(recs), 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(std::isnan(escalation_rate({})));
  EXPECT_TRUE(std::isnan(prediction_accuracy_rate({})));
}

TEST(ScorePolicy, BruteForceOverAllDecisionVectors) {
  const double accs[12] = {0.5, 0.55, 0.6, 0.7, 0.74, 0.75, 0.76, 0.8, 0.85, 0.9, 0.95, 1.0};
  const CostModel cost = CostModel::from_ratio(4);
  for (unsigned mask = 0; mask < (1u << 12); ++mask) {
    std::vector<TrialRecord> recs;
    int expect = 0;
    for (int i = 0; i < 12; ++i) {
      const bool esc = (mask >> i) & 1u;
      recs.push_back(rec(accs[i], esc ? Decision::Escalate : Decision::Implement));
      // Expected costs in hundredths: implement 4 (100 - pct), escalate 100.
      const int pct = static_cast<int>(std::lround(accs[i] * 100));
      const bool optimal_esc = 4 * (100 - pct) > 100;
      expect += esc == optimal_esc;
    }
    ASSERT_DOUBLE_EQ(score_policy(recs, cost), expect / 12.0) << mask;
  }
}

TEST(ScorePolicy, ScaleInvariantAndFailuresCountWrong) {
  std::vector<TrialRecord> recs;
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const double p = static_cast<double>(50 + rng.below(51)) / 100.0;
    recs.push_back(rec(p, rng.bernoulli(0.5) ? Decision::Escalate : Decision::Implement));
  }
  const CostModel base(1.0, 4.0);
  const double s = score_policy(recs, base);
  for (double k : {0.001, 0.1, 3.0, 250.0}) {
    EXPECT_DOUBLE_EQ(score_policy(recs, base.scaled(k)), s) << k;
  }
  std::vector<TrialRecord> failed = {rec(0.9, std::nullopt)};
  EXPECT_DOUBLE_EQ(score_policy(failed, base), 0.0);
  EXPECT_THROW(score_policy({}, base), ConstraintViolation);
}

TEST(ScorePolicy, CoinFlipScoresAboutHalf) {
  std::vector<TrialRecord> recs;
  Rng rng(19);
  for (int i = 0; i < 20000; ++i) {
    const double p = static_cast<double>(50 + rng.below(51)) / 100.0;
    recs.push_back(rec(p, rng.bernoulli(0.5) ? Decision::Escalate : Decision::Implement));
  }
  EXPECT_NEAR(score_policy(recs, CostModel::from_ratio(4)), 0.5, 4 * 0.5 / std::sqrt(20000.0));
}

TEST(ScorePolicy, NoSignalRecordsUseConditionAccuracy) {
  std::vector<TrialRecord> recs = {rec(0.6, Decision::Escalate, false),
                                   rec(0.9, Decision::Escalate, false)};
  EXPECT_DOUBLE_EQ(score_policy(recs, CostModel::from_ratio(4)), 0.5);
}

}  // namespace
}  // namespace escalate
