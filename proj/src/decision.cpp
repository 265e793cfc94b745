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
#include <numeric>

#include <fmt/format.h>

#include "escalate/error.hpp"

namespace escalate {
namespace {

constexpr double kMassTolerance = 1e-12;

void require_probability(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ConstraintViolation(fmt::format("{} must lie in [0, 1], got {}", name, x));
  }
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double std_normal_pdf(double z) {
  static const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * M_PI);
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

}  // namespace

std::string_view to_string(Decision d) {
  return d == Decision::Implement ? "implement" : "escalate";
}

CostModel::CostModel(double labor_cost, double error_cost)
    : labor_cost_(labor_cost), error_cost_(error_cost) {
  if (!(labor_cost > 0.0) || !std::isfinite(labor_cost)) {
    throw ConstraintViolation(
        fmt::format("labor cost must be positive, got {}", labor_cost));
  }
  if (!(error_cost > labor_cost) || !std::isfinite(error_cost)) {
    throw ConstraintViolation(fmt::format(
        "error cost must exceed labor cost (c_l={}, c_w={})", labor_cost, error_cost));
  }
}

CostModel CostModel::from_ratio(double ratio) { return CostModel(1.0, ratio); }

CostModel CostModel::scaled(double k) const {
  if (!(k > 0.0)) throw ConstraintViolation("cost scale must be positive");
  return CostModel(labor_cost_ * k, error_cost_ * k);
}

AccuracyDistribution AccuracyDistribution::uniform() {
  return AccuracyDistribution(UniformDensity{});
}

AccuracyDistribution AccuracyDistribution::truncated_normal(double mean, double sd) {
  if (!(sd > 0.0) || !std::isfinite(mean)) {
    throw ConstraintViolation("truncated normal needs a finite mean and sd > 0");
  }
  AccuracyDistribution d(TruncatedNormalDensity{mean, sd});
  d.normalizer_ = std_normal_cdf((1.0 - mean) / sd) - std_normal_cdf(-mean / sd);
  if (!(d.normalizer_ > 1e-300)) {
    throw ConstraintViolation("truncated normal has no mass on [0, 1]");
  }
  return d;
}

AccuracyDistribution AccuracyDistribution::histogram(std::vector<double> edges,
                                                     std::vector<double> masses) {
  if (edges.size() < 2 || edges.size() != masses.size() + 1) {
    throw ConstraintViolation("histogram needs edges.size() == masses.size() + 1 >= 2");
  }
  if (edges.front() < 0.0 || edges.back() > 1.0) {
    throw ConstraintViolation("histogram edges must lie in [0, 1]");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) {
      throw ConstraintViolation("histogram edges must be strictly increasing");
    }
  }
  for (double m : masses) {
    if (!(m >= 0.0)) throw ConstraintViolation("histogram masses must be nonnegative");
  }
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw ConstraintViolation(
        fmt::format("histogram masses must sum to 1, got {:.17g}", total));
  }
  return AccuracyDistribution(HistogramDensity{std::move(edges), std::move(masses)});
}

double AccuracyDistribution::density(double p) const {
  if (p < 0.0 || p > 1.0) return 0.0;
  if (std::holds_alternative<UniformDensity>(rep_)) return 1.0;
  if (const auto* tn = std::get_if<TruncatedNormalDensity>(&rep_)) {
    return std_normal_pdf((p - tn->mean) / tn->sd) / (tn->sd * normalizer_);
  }
  const auto& h = std::get<HistogramDensity>(rep_);
  if (p < h.edges.front() || p > h.edges.back()) return 0.0;
  auto it = std::upper_bound(h.edges.begin(), h.edges.end(), p);
  std::size_t bin = it == h.edges.end() ? h.masses.size() - 1
                                        : static_cast<std::size_t>(it - h.edges.begin()) - 1;
  return h.masses[bin] / (h.edges[bin + 1] - h.edges[bin]);
}

double AccuracyDistribution::mass_below(double tau) const {
  tau = std::clamp(tau, 0.0, 1.0);
  if (std::holds_alternative<UniformDensity>(rep_)) return tau;
  if (const auto* tn = std::get_if<TruncatedNormalDensity>(&rep_)) {
    const double lo = std_normal_cdf(-tn->mean / tn->sd);
    return (std_normal_cdf((tau - tn->mean) / tn->sd) - lo) / normalizer_;
  }
  const auto& h = std::get<HistogramDensity>(rep_);
  double acc = 0.0;
  for (std::size_t i = 0; i < h.masses.size(); ++i) {
    const double a = h.edges[i];
    const double b = h.edges[i + 1];
    if (tau >= b) {
      acc += h.masses[i];
    } else if (tau > a) {
      acc += h.masses[i] * (tau - a) / (b - a);
    }
  }
  return acc;
}

double AccuracyDistribution::partial_mean_above(double tau) const {
  tau = std::clamp(tau, 0.0, 1.0);
  if (std::holds_alternative<UniformDensity>(rep_)) return 0.5 * (1.0 - tau * tau);
  if (const auto* tn = std::get_if<TruncatedNormalDensity>(&rep_)) {
    // int p phi((p-m)/s)/s dp = m Phi(z) - s phi(z)
    const double z_lo = (tau - tn->mean) / tn->sd;
    const double z_hi = (1.0 - tn->mean) / tn->sd;
    const double num = tn->mean * (std_normal_cdf(z_hi) - std_normal_cdf(z_lo)) -
                       tn->sd * (std_normal_pdf(z_hi) - std_normal_pdf(z_lo));
    return num / normalizer_;
  }
  const auto& h = std::get<HistogramDensity>(rep_);
  double acc = 0.0;
  for (std::size_t i = 0; i < h.masses.size(); ++i) {
    const double a = std::max(h.edges[i], tau);
    const double b = h.edges[i + 1];
    if (b <= a) continue;
    const double height = h.masses[i] / (h.edges[i + 1] - h.edges[i]);
    acc += height * 0.5 * (b * b - a * a);
  }
  return acc;
}

double optimal_threshold(const CostModel& cost) {
  return 1.0 - cost.labor_cost() / cost.error_cost();
}

double expected_cost_point(double p, double tau, const CostModel& cost) {
  require_probability(p, "p");
  require_probability(tau, "tau");
  if (p < tau) return cost.labor_cost();
  return (1.0 - p) * cost.error_cost();
}

double expected_cost_functional(const AccuracyDistribution& dist, double tau,
                                const CostModel& cost) {
  require_probability(tau, "tau");
  const double below = dist.mass_below(tau);
  const double above = dist.mass_below(1.0) - below;
  return cost.labor_cost() * below +
         cost.error_cost() * (above - dist.partial_mean_above(tau));
}

double effective_threshold(double tau_star, double mu) {
  require_probability(tau_star, "tau_star");
  return tau_star - mu;
}

ClampedThreshold clamp_threshold(double tau) {
  const double c = std::clamp(tau, 0.0, 1.0);
  return {c, c != tau};
}

double miscalibration_penalty(const AccuracyDistribution& dist, double mu,
                              const CostModel& cost) {
  const double tau_star = optimal_threshold(cost);
  const double applied = clamp_threshold(effective_threshold(tau_star, mu)).value;
  return expected_cost_functional(dist, applied, cost) -
         expected_cost_functional(dist, tau_star, cost);
}

Decision bayes_decision(double p, const CostModel& cost) {
  require_probability(p, "p");
  return p < optimal_threshold(cost) ? Decision::Escalate : Decision::Implement;
}

}  // namespace escalate
