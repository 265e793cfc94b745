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

#include "escalate/characterize.hpp"

#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "escalate/error.hpp"

namespace escalate {
namespace {

bool is_curve_condition(const ConditionConfig& c) {
  return c.signal_present && !c.cost_framing && !c.thinking;
}

std::vector<TrialRecord> of_kind(std::span<const TrialRecord> records, DatasetKind kind) {
  std::vector<TrialRecord> out;
  for (const auto& r : records) {
    if (r.dataset_kind == kind) out.push_back(r);
  }
  return out;
}

}  // namespace

ImplicitThreshold try_fit(const EscalationCurve& curve, FitWeighting weighting) {
  if (curve.points.size() >= 2) {
    try {
      return fit_implicit_threshold(curve, weighting);
    } catch (const DegenerateFitError&) {
    }
  }
  ImplicitThreshold t;
  t.ill_posed = true;
  t.fit.n = curve.points.size();
  t.fit.weighting = weighting;
  return t;
}

CharacterizationReport characterize_records(const std::string& agent_id,
                                            const std::string& scope,
                                            std::span<const TrialRecord> signal_records,
                                            std::span<const TrialRecord> no_signal_records,
                                            double bin_width, FitWeighting weighting) {
  const EscalationCurve curve = escalation_curve(signal_records, bin_width);
  const ImplicitThreshold threshold = try_fit(curve, weighting);
  double rate = escalation_rate(no_signal_records);
  double accuracy = prediction_accuracy_rate(no_signal_records);
  CharacterizationReport r;
  r.agent_id = agent_id;
  r.scope = scope;
  r.implicit_threshold = threshold;
  r.no_signal_rate = std::isnan(rate) ? 0.0 : rate;
  r.actual_accuracy = std::isnan(accuracy) ? 0.0 : accuracy;
  if (!std::isnan(rate)) {
    r.self_estimate = self_estimated_accuracy(threshold.fit, rate);
  } else {
    r.self_estimate.unclamped = rate;
  }
  return r;
}

Characterization characterize(const AgentSpec& agent, std::span<const SignaledScenario> pool,
                              const CharacterizeOptions& options) {
  const ConditionConfig* curve_condition = nullptr;
  const ConditionConfig* no_signal = nullptr;
  for (const auto& c : options.conditions) {
    if (c.name == "baseline" && is_curve_condition(c)) curve_condition = &c;
  }
  for (const auto& c : options.conditions) {
    if (!curve_condition && is_curve_condition(c)) curve_condition = &c;
    if (!no_signal && !c.signal_present && !c.cost_framing && !c.thinking) no_signal = &c;
  }
  if (!curve_condition) {
    throw ConfigError("characterization needs a signal condition without framing or thinking");
  }
  if (!no_signal) throw ConfigError("characterization needs a no-signal condition");
  for (const auto& c : options.conditions) {
    if (c.sample_count > pool.size()) {
      throw ConfigError(fmt::format("condition '{}' needs {} scenarios but the pool has {}",
                                    c.name, c.sample_count, pool.size()));
    }
  }

  Characterization out;
  out.agent_id = agent.id;
  const ConditionRun* baseline_run = nullptr;
  const ConditionRun* no_signal_run = nullptr;
  out.runs.reserve(options.conditions.size());
  for (const auto& c : options.conditions) {
    RunOptions run = options.run;
    std::unique_ptr<RecordWriter> writer;
    if (options.record_dir) {
      writer = std::make_unique<RecordWriter>(*options.record_dir / (c.name + ".jsonl"));
      run.sink = writer.get();
    }
    ConditionRun cr;
    cr.condition = c;
    cr.records = run_condition(agent, pool, c, options.master_seed, run);
    if (c.signal_present) {
      cr.curve = escalation_curve(cr.records, options.bin_width);
      cr.threshold = try_fit(cr.curve, options.weighting);
      if (cr.curve.excluded_failures > 0) {
        out.notes.push_back(fmt::format("{}: {} trials without a parsed decision excluded",
                                        c.name, cr.curve.excluded_failures));
      }
    }
    out.runs.push_back(std::move(cr));
  }
  baseline_run = &out.runs[curve_condition - options.conditions.data()];
  no_signal_run = &out.runs[no_signal - options.conditions.data()];

  out.curve = baseline_run->curve;
  out.threshold = baseline_run->threshold;
  for (double c : out.curve.empty_bins) {
    out.notes.push_back(fmt::format("bin centered at {:.3f} has no trials", c));
  }
  if (out.threshold.ill_posed) {
    out.notes.push_back("p* ill-posed: escalation curve is not decreasing");
  }
  out.pooled = characterize_records(agent.id, "pooled", baseline_run->records,
                                    no_signal_run->records, options.bin_width,
                                    options.weighting);
  if (options.per_dataset) {
    for (DatasetKind kind : kAllDatasetKinds) {
      const auto signal = of_kind(baseline_run->records, kind);
      const auto none = of_kind(no_signal_run->records, kind);
      if (signal.empty() && none.empty()) continue;
      out.per_dataset.push_back(characterize_records(agent.id, std::string(to_string(kind)),
                                                     signal, none, options.bin_width,
                                                     options.weighting));
    }
  }
  return out;
}

}  // namespace escalate
