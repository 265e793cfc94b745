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

#include "escalate/decision.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "escalate/error.hpp"
#include "test_support.hpp"

namespace escalate {
namespace {

using testing::midpoint_cost;
using testing::test_densities;

TEST(CostModel, RejectsInvalidCosts) {
  EXPECT_THROW(CostModel(0.0, 1.0), ConstraintViolation);
  EXPECT_THROW(CostModel(1.0, 1.0), ConstraintViolation);
  EXPECT_THROW(CostModel(2.0, 1.0), ConstraintViolation);
  EXPECT_THROW(CostModel(1.0, INFINITY), ConstraintViolation);
  EXPECT_THROW(CostModel::from_ratio(1.0), ConstraintViolation);
  EXPECT_THROW(CostModel::from_ratio(0.5), ConstraintViolation);
  EXPECT_NO_THROW(CostModel(1.0, 1.0001));
}

TEST(OptimalThreshold, GridImage) {
  const double ratios[] = {2, 4, 8, 10, 20, 50};
  const double expected[] = {0.5, 0.75, 0.875, 0.9, 0.95, 0.98};
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(optimal_threshold(CostModel::from_ratio(ratios[i])), expected[i], 1e-12)
        << "R = " << ratios[i];
  }
  EXPECT_NEAR(optimal_threshold(CostModel(1, 1.0001)), 1.0 - 1.0 / 1.0001, 1e-12);
}

TEST(OptimalThreshold, ScaleInvariant) {
  const CostModel base(1.5, 7.0);
  for (double k : {1e-3, 0.5, 2.0, 1e3}) {
    EXPECT_NEAR(optimal_threshold(base.scaled(k)), optimal_threshold(base), 1e-12);
  }
}

TEST(ExpectedCostPoint, TieImplements) {
  const auto cost = CostModel::from_ratio(4.0);
  EXPECT_DOUBLE_EQ(expected_cost_point(0.75, 0.75, cost), 0.25 * 4.0);
  EXPECT_DOUBLE_EQ(expected_cost_point(0.74, 0.75, cost), 1.0);
  EXPECT_DOUBLE_EQ(expected_cost_point(0.9, 0.75, cost), 0.1 * 4.0);
  EXPECT_THROW(expected_cost_point(1.2, 0.5, cost), ConstraintViolation);
}

// Hand-integrated: for f = 1 and R = 4, C(tau) = tau + 2 (1 - tau)^2.
TEST(ExpectedCostFunctional, UniformClosedForm) {
  const auto cost = CostModel::from_ratio(4.0);
  const auto u = AccuracyDistribution::uniform();
  EXPECT_NEAR(expected_cost_functional(u, 0.0, cost), 2.0, 1e-12);
  EXPECT_NEAR(expected_cost_functional(u, 0.5, cost), 1.0, 1e-12);
  EXPECT_NEAR(expected_cost_functional(u, 0.75, cost), 0.875, 1e-12);
  EXPECT_NEAR(expected_cost_functional(u, 1.0, cost), 1.0, 1e-12);
}

TEST(ExpectedCostFunctional, MatchesMidpointQuadrature) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& dist : test_densities()) {
    for (int k = 0; k < 8; ++k) {
      const double tau = unit(gen);
      const CostModel cost(0.5 + unit(gen), 2.0 + 10.0 * unit(gen));
      EXPECT_NEAR(expected_cost_functional(dist, tau, cost), midpoint_cost(dist, tau, cost),
                  1e-6);
    }
  }
}

TEST(AccuracyDistribution, MassesIntegrateToOne) {
  for (const auto& dist : test_densities()) {
    EXPECT_NEAR(dist.mass_below(1.0), 1.0, 1e-12);
    EXPECT_NEAR(dist.mass_below(0.0), 0.0, 1e-12);
  }
}

TEST(AccuracyDistribution, ValidatesHistograms) {
  EXPECT_THROW(AccuracyDistribution::histogram({0.0, 0.5}, {0.5, 0.5}), ConstraintViolation);
  EXPECT_THROW(AccuracyDistribution::histogram({0.0, 0.6, 0.5, 1.0}, {0.3, 0.3, 0.4}),
               ConstraintViolation);
  EXPECT_THROW(AccuracyDistribution::histogram({0.0, 1.0}, {0.9}), ConstraintViolation);
  EXPECT_THROW(AccuracyDistribution::histogram({0.0, 1.5}, {1.0}), ConstraintViolation);
  EXPECT_THROW(AccuracyDistribution::truncated_normal(0.5, 0.0), ConstraintViolation);
}

TEST(ExpectedCostFunctional, GridMinimumAtOptimalThreshold) {
  for (double r : {1.5, 2.0, 4.0, 10.0, 50.0}) {
    const auto cost = CostModel::from_ratio(r);
    const double tau_star = optimal_threshold(cost);
    for (const auto& dist : test_densities()) {
      // Narrow densities are flat far from their peak, so several grid
      // points can tie in floating point. Require that a point next to
      // tau* reaches the minimum rather than that it is the first argmin.
      std::vector<double> costs;
      for (int i = 0; i <= 1000; ++i) {
        costs.push_back(expected_cost_functional(dist, i / 1000.0, cost));
      }
      const double lowest = *std::min_element(costs.begin(), costs.end());
      const double slack = 1e-12 * std::max(1.0, std::abs(lowest));
      bool attained = false;
      for (int i = 0; i <= 1000; ++i) {
        if (std::abs(i / 1000.0 - tau_star) <= 1e-3 + 1e-12 && costs[i] <= lowest + slack) {
          attained = true;
        }
      }
      EXPECT_TRUE(attained) << "R = " << r;
    }
  }
}

TEST(ExpectedCostFunctional, DerivativeMatchesIntegrand) {
  const auto cost = CostModel::from_ratio(4.0);
  for (const auto& dist : test_densities()) {
    for (double tau : {0.3, 0.62, 0.77, 0.93}) {
      const double h = 1e-6;
      const double fd = (expected_cost_functional(dist, tau + h, cost) -
                         expected_cost_functional(dist, tau - h, cost)) /
                        (2 * h);
      const double analytic =
          dist.density(tau) * (cost.labor_cost() - (1.0 - tau) * cost.error_cost());
      EXPECT_NEAR(fd, analytic, 1e-4 * std::max(1.0, std::abs(analytic)));
    }
  }
}

TEST(MiscalibrationPenalty, UniformHandValue) {
  // C(0.5) - C(0.75) with C(tau) = tau + 2 (1 - tau)^2.
  const auto cost = CostModel::from_ratio(4.0);
  EXPECT_NEAR(miscalibration_penalty(AccuracyDistribution::uniform(), 0.25, cost), 0.125, 1e-12);
  EXPECT_NEAR(miscalibration_penalty(AccuracyDistribution::uniform(), 0.0, cost), 0.0, 1e-15);
}

TEST(MiscalibrationPenalty, NonnegativeAndMonotoneInMagnitude) {
  const auto cost = CostModel::from_ratio(4.0);
  for (const auto& dist : test_densities()) {
    for (int sign : {-1, 1}) {
      double prev = 0.0;
      for (int k = 0; k <= 8; ++k) {
        const double pen = miscalibration_penalty(dist, sign * 0.05 * k, cost);
        EXPECT_GE(pen, -1e-9);
        EXPECT_GE(pen, prev - 1e-9);
        prev = pen;
      }
    }
  }
}

TEST(EffectiveThreshold, ClampingIsReported) {
  EXPECT_DOUBLE_EQ(effective_threshold(0.75, 0.1), 0.65);
  EXPECT_DOUBLE_EQ(effective_threshold(0.75, -0.4), 1.15);
  const auto c = clamp_threshold(1.15);
  EXPECT_DOUBLE_EQ(c.value, 1.0);
  EXPECT_TRUE(c.clamped);
  EXPECT_FALSE(clamp_threshold(0.4).clamped);
}

TEST(BayesDecision, StrictInequality) {
  const auto cost = CostModel::from_ratio(4.0);
  EXPECT_EQ(bayes_decision(0.75, cost), Decision::Implement);
  EXPECT_EQ(bayes_decision(0.7499, cost), Decision::Escalate);
  EXPECT_EQ(bayes_decision(1.0, cost), Decision::Implement);
  EXPECT_EQ(bayes_decision(0.0, cost), Decision::Escalate);
}

}  // namespace
}  // namespace escalate
