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

// Experiment conditions, trial execution and the JSON-lines record log.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "escalate/agent.hpp"
#include "escalate/dataset.hpp"
#include "escalate/error.hpp"
#include "escalate/external_agent.hpp"
#include "escalate/protocol.hpp"
#include "escalate/rule_follower.hpp"
#include "escalate/stump.hpp"

namespace escalate {

struct ConditionConfig {
  std::string name = "baseline";
  bool signal_present = true;
  std::optional<double> cost_framing;
  FramingVariant framing = FramingVariant::Original;
  bool thinking = false;
  std::size_t sample_count = 250;

  static ConditionConfig baseline();
  static ConditionConfig no_signal();
  static ConditionConfig cost_ratio(double ratio = 4.0);
  static ConditionConfig thinking_only();
  static ConditionConfig thinking_cost(double ratio = 4.0);

  // Throws ConstraintViolation.
  void validate() const;

  bool operator==(const ConditionConfig&) const = default;
};

// Baseline, No signal, Cost ratio 4, Thinking, Thinking + Cost 4.
std::vector<ConditionConfig> standard_conditions();

using AgentKind = std::variant<SimulatedAgentSpec, ExternalAgentSpec, RuleFollowerSpec>;

struct AgentSpec {
  std::string id;
  AgentKind kind;

  bool operator==(const AgentSpec&) const = default;
};

nlohmann::json to_json(const AgentSpec& agent);
// Throws ConfigError naming the offending field.
AgentSpec agent_from_json(const nlohmann::json& j);

struct TrialRecord {
  std::string trial_id;
  std::string agent_id;
  DatasetKind dataset_kind = DatasetKind::LendingClub;
  std::string scenario_id;
  ConditionConfig condition;
  // Displayed signal accuracy; absent in no-signal conditions.
  std::optional<double> signal_accuracy;
  // Displayed accuracy of the scenario's signal whether or not it was shown.
  // Scoring uses it so no-signal runs are judged against the same rule.
  double condition_accuracy = 0.0;
  Parsed<int> prediction = ParseFailure{"not run"};
  std::optional<bool> prediction_correct;
  Parsed<Decision> decision = ParseFailure{"not run"};
  std::uint64_t seed = 0;
  std::optional<std::string> timestamp;
  std::optional<Transcript> transcript;

  bool prediction_parsed() const { return std::holds_alternative<int>(prediction); }
  bool decision_parsed() const { return std::holds_alternative<Decision>(decision); }
  std::optional<Decision> decided() const;

  // Throws SchemaError when an invariant is broken.
  void validate() const;

  bool operator==(const TrialRecord&) const = default;
};

nlohmann::json to_json(const TrialRecord& record);
// Throws SchemaError.
TrialRecord record_from_json(const nlohmann::json& j);

inline constexpr int kRecordSchemaVersion = 1;

class SchemaVersionError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

// Single writer for a record log. Completed trials may arrive out of order;
// they are buffered and appended in trial order, flushing after each line.
class RecordWriter {
 public:
  // Creates or truncates the file and writes the header. Throws IoError.
  explicit RecordWriter(const std::filesystem::path& path);

  void submit(std::size_t index, const TrialRecord& record);
  std::size_t written() const;

 private:
  mutable std::mutex mu_;
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t next_ = 0;
  std::map<std::size_t, std::string> pending_;
};

void persist_records(std::span<const TrialRecord> records, const std::filesystem::path& path);
// Throws IoError, SchemaVersionError, or SchemaError naming the line.
std::vector<TrialRecord> load_records(const std::filesystem::path& path);

// One reply per call; replaces the network or local agent in tests.
using Responder = std::function<QueryResult(const Transcript&)>;

struct RunOptions {
  // In-flight trial cap.
  std::size_t jobs = 1;
  // Reuse one seeded draw for every condition of a run.
  bool paired = true;
  bool keep_transcripts = true;
  RecordWriter* sink = nullptr;
  // Overrides how protocol agents are queried.
  Responder responder;
};

// Indices drawn without replacement for a condition.
std::vector<std::size_t> draw_sample(std::size_t pool_size, const ConditionConfig& condition,
                                     std::uint64_t master_seed, bool paired);

// Throws ConfigError before any trial when the pool is smaller than
// sample_count. Failed trials are recorded, never dropped.
std::vector<TrialRecord> run_condition(const AgentSpec& agent,
                                       std::span<const SignaledScenario> pool,
                                       const ConditionConfig& condition,
                                       std::uint64_t master_seed,
                                       const RunOptions& options = {});

struct RunManifest {
  std::string command;
  AgentSpec agent;
  std::vector<ConditionConfig> conditions;
  std::uint64_t master_seed = 0;
  bool paired = true;
  std::string sampling = "without-replacement";
  std::map<std::string, std::string> dataset_hashes;
  std::map<std::string, std::string> settings;
};

nlohmann::json to_json(const ConditionConfig& condition);
ConditionConfig condition_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunManifest& manifest);

// Writes the manifest and returns its content hash (16 hex digits).
std::string write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

}  // namespace escalate
