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

// Simulated agents: perceive p_hat = clamp(p + bias + noise) and escalate when
// p_hat falls below the agent's own threshold, either sharply or along a
// logistic response.

#include <cstdint>
#include <variant>

#include "escalate/decision.hpp"

namespace escalate {

// Deterministic: escalate iff perceived < threshold.
struct StepResponse {
  bool operator==(const StepResponse&) const = default;
};

// Escalate with probability sigmoid(slope * (threshold - perceived)).
struct LogisticResponse {
  double slope = 10.0;

  bool operator==(const LogisticResponse&) const = default;
};

using ResponseShape = std::variant<StepResponse, LogisticResponse>;

// Prediction correct with probability equal to the condition's accuracy.
struct SignalFaithful {
  bool operator==(const SignalFaithful&) const = default;
};

struct FixedAccuracy {
  double accuracy = 0.75;

  bool operator==(const FixedAccuracy&) const = default;
};

using PredictionAccuracyModel = std::variant<SignalFaithful, FixedAccuracy>;

struct SimulatedAgentSpec {
  double decision_threshold = 0.75;
  double bias = 0.0;
  double noise_sd = 0.0;
  ResponseShape response = StepResponse{};
  PredictionAccuracyModel prediction_accuracy = SignalFaithful{};
  // What the agent believes its accuracy is when no signal is shown.
  double prior_self_accuracy = 0.75;

  // Throws ConstraintViolation.
  void validate() const;

  bool operator==(const SimulatedAgentSpec&) const = default;
};

// Step agent at the cost-optimal threshold with no bias or noise.
SimulatedAgentSpec omniscient_agent(const CostModel& cost);

// clamp(true_accuracy + bias + Normal(0, noise_sd), 0, 1), seeded.
double perceive(const SimulatedAgentSpec& agent, double true_accuracy, std::uint64_t seed);

Decision simulated_decision(const SimulatedAgentSpec& agent, double perceived,
                            std::uint64_t seed);

// Probability that the agent's prediction is correct for a condition with
// the given accuracy.
double prediction_accuracy(const SimulatedAgentSpec& agent, double condition_accuracy);

}  // namespace escalate
