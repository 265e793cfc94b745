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

#include "escalate/agent.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "escalate/error.hpp"
#include "escalate/rng.hpp"

namespace escalate {

void SimulatedAgentSpec::validate() const {
  if (!(decision_threshold >= 0.0 && decision_threshold <= 1.0)) {
    throw ConstraintViolation(
        fmt::format("decision_threshold must lie in [0, 1], got {}", decision_threshold));
  }
  if (!(bias >= -1.0 && bias <= 1.0)) {
    throw ConstraintViolation(fmt::format("bias must lie in [-1, 1], got {}", bias));
  }
  if (!(noise_sd >= 0.0)) throw ConstraintViolation("noise_sd must be nonnegative");
  if (!(prior_self_accuracy >= 0.0 && prior_self_accuracy <= 1.0)) {
    throw ConstraintViolation("prior_self_accuracy must lie in [0, 1]");
  }
  if (const auto* l = std::get_if<LogisticResponse>(&response); l && !(l->slope > 0.0)) {
    throw ConstraintViolation("logistic slope must be positive");
  }
  if (const auto* f = std::get_if<FixedAccuracy>(&prediction_accuracy);
      f && !(f->accuracy >= 0.0 && f->accuracy <= 1.0)) {
    throw ConstraintViolation("fixed prediction accuracy must lie in [0, 1]");
  }
}

SimulatedAgentSpec omniscient_agent(const CostModel& cost) {
  SimulatedAgentSpec a;
  a.decision_threshold = optimal_threshold(cost);
  return a;
}

double perceive(const SimulatedAgentSpec& agent, double true_accuracy, std::uint64_t seed) {
  if (!(true_accuracy >= 0.0 && true_accuracy <= 1.0)) {
    throw ConstraintViolation("true accuracy must lie in [0, 1]");
  }
  double noise = 0.0;
  if (agent.noise_sd > 0.0) {
    Rng rng(seed);
    noise = rng.normal(0.0, agent.noise_sd);
  }
  return std::clamp(true_accuracy + agent.bias + noise, 0.0, 1.0);
}

Decision simulated_decision(const SimulatedAgentSpec& agent, double perceived,
                            std::uint64_t seed) {
  if (const auto* logistic = std::get_if<LogisticResponse>(&agent.response)) {
    const double z = logistic->slope * (agent.decision_threshold - perceived);
    const double p_escalate = 1.0 / (1.0 + std::exp(-z));
    Rng rng(seed);
    return rng.bernoulli(p_escalate) ? Decision::Escalate : Decision::Implement;
  }
  return perceived < agent.decision_threshold ? Decision::Escalate : Decision::Implement;
}

double prediction_accuracy(const SimulatedAgentSpec& agent, double condition_accuracy) {
  if (const auto* fixed = std::get_if<FixedAccuracy>(&agent.prediction_accuracy)) {
    return fixed->accuracy;
  }
  return condition_accuracy;
}

}  // namespace escalate
