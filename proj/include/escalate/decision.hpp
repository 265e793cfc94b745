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

// Cost calculus for the implement-or-escalate decision.
//
// An agent that escalates pays the labor cost c_l; an agent that implements
// pays c_w when its prediction turns out wrong and nothing otherwise. With
// probability-of-correctness p, implementing costs (1 - p) c_w in
// expectation, so the cost-optimal rule escalates iff p < 1 - c_l / c_w.

#include <string_view>
#include <variant>
#include <vector>

namespace escalate {

enum class Decision : int { Implement = 0, Escalate = 1 };

std::string_view to_string(Decision d);

class CostModel {
 public:
  // Throws ConstraintViolation unless 0 < labor_cost < error_cost.
  CostModel(double labor_cost, double error_cost);

  // c_l = 1, c_w = ratio.
  static CostModel from_ratio(double ratio);

  double labor_cost() const { return labor_cost_; }
  double error_cost() const { return error_cost_; }
  double ratio() const { return error_cost_ / labor_cost_; }

  CostModel scaled(double k) const;

 private:
  double labor_cost_;
  double error_cost_;
};

struct UniformDensity {};

// Normal(mean, sd) restricted to [0, 1] and renormalized.
struct TruncatedNormalDensity {
  double mean = 0.5;
  double sd = 0.1;
};

// Piecewise-constant density. edges has one more entry than masses; masses
// are probabilities (not heights) and sum to 1.
struct HistogramDensity {
  std::vector<double> edges;
  std::vector<double> masses;
};

// Distribution f(p) of true accuracy across instances.
class AccuracyDistribution {
 public:
  using Representation =
      std::variant<UniformDensity, TruncatedNormalDensity, HistogramDensity>;

  static AccuracyDistribution uniform();
  static AccuracyDistribution truncated_normal(double mean, double sd);
  static AccuracyDistribution histogram(std::vector<double> edges,
                                        std::vector<double> masses);

  double density(double p) const;

  // Integral of f over [0, tau].
  double mass_below(double tau) const;

  // Integral of p f(p) over [tau, 1].
  double partial_mean_above(double tau) const;

  const Representation& representation() const { return rep_; }

 private:
  explicit AccuracyDistribution(Representation rep) : rep_(std::move(rep)) {}

  Representation rep_;
  // Normalizer of the truncated normal; unused otherwise.
  double normalizer_ = 1.0;
};

// tau* = 1 - c_l / c_w.
double optimal_threshold(const CostModel& cost);

// Expected cost of a single instance with accuracy p under threshold tau.
// p == tau implements.
double expected_cost_point(double p, double tau, const CostModel& cost);

// C(tau) = int_0^tau c_l f(p) dp + int_tau^1 (1 - p) c_w f(p) dp, evaluated in
// closed form for every supported density.
double expected_cost_functional(const AccuracyDistribution& dist, double tau,
                                const CostModel& cost);

// Threshold actually applied by an agent whose estimates are shifted by mu.
// Not clamped: values outside [0, 1] are meaningful (always-escalate or
// always-implement) and are kept for reporting.
double effective_threshold(double tau_star, double mu);

struct ClampedThreshold {
  double value = 0.0;
  bool clamped = false;
};

ClampedThreshold clamp_threshold(double tau);

// C(clamp(tau* - mu)) - C(tau*). Nonnegative up to rounding.
double miscalibration_penalty(const AccuracyDistribution& dist, double mu,
                              const CostModel& cost);

// Escalate iff p < tau*.
Decision bayes_decision(double p, const CostModel& cost);

}  // namespace escalate
