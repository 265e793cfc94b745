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

// Full characterization of one agent: runs the experimental conditions,
// builds the escalation curve from the baseline condition, fits p*, and
// inverts the no-signal escalation rate into a self-estimated accuracy.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "escalate/analysis.hpp"
#include "escalate/runner.hpp"

namespace escalate {

struct CharacterizeOptions {
  std::vector<ConditionConfig> conditions = standard_conditions();
  std::uint64_t master_seed = 0;
  double bin_width = 0.05;
  FitWeighting weighting = FitWeighting::Unweighted;
  // Also fit each dataset separately. The pooled fit is always reported.
  bool per_dataset = true;
  RunOptions run;
  // When set, each condition's records go to <dir>/<condition>.jsonl as
  // trials complete.
  std::optional<std::filesystem::path> record_dir;
};

struct ConditionRun {
  ConditionConfig condition;
  std::vector<TrialRecord> records;
  EscalationCurve curve;
  ImplicitThreshold threshold;
};

struct Characterization {
  std::string agent_id;
  std::vector<ConditionRun> runs;
  // Signal curve and fit used for p* and a-hat.
  EscalationCurve curve;
  ImplicitThreshold threshold;
  CharacterizationReport pooled;
  std::vector<CharacterizationReport> per_dataset;
  std::vector<std::string> notes;
};

// Fit that never throws: too few points or identical accuracies come back
// ill-posed.
ImplicitThreshold try_fit(const EscalationCurve& curve, FitWeighting weighting);

// Report from a signal curve's records and no-signal records.
CharacterizationReport characterize_records(const std::string& agent_id,
                                            const std::string& scope,
                                            std::span<const TrialRecord> signal_records,
                                            std::span<const TrialRecord> no_signal_records,
                                            double bin_width, FitWeighting weighting);

// The curve comes from the condition named "baseline", else the first
// signal-present condition without framing or thinking. Throws ConfigError
// when no such condition or no no-signal condition is configured.
Characterization characterize(const AgentSpec& agent, std::span<const SignaledScenario> pool,
                              const CharacterizeOptions& options);

}  // namespace escalate
