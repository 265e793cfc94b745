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

#include "escalate/runner.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "escalate/hash.hpp"
#include "escalate/rng.hpp"

namespace escalate {

using nlohmann::json;

namespace {

// Stream id for the shared draw of a paired run.
constexpr std::uint64_t kPairedDrawStream = 0x7061697265640001ULL;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <typename T>
T field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(fmt::format("missing field '{}'", key));
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw SchemaError(fmt::format("field '{}' has the wrong type", key));
  }
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw SchemaError(fmt::format("field '{}' has the wrong type", key));
  }
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const Transcript& t) {
  json turns = json::array();
  for (const auto& turn : t.turns) {
    turns.push_back({{"role", std::string(to_string(turn.role))}, {"text", turn.text}});
  }
  return {{"turns", std::move(turns)},
          {"signal_present", t.flags.signal_present},
          {"cost_ratio_framing", optional_json(t.flags.cost_ratio_framing)},
          {"thinking", t.flags.thinking}};
}

Transcript transcript_from_json(const json& j) {
  Transcript t;
  for (const auto& turn : field<json>(j, "turns")) {
    const auto role = field<std::string>(turn, "role");
    if (role != "user" && role != "assistant") {
      throw SchemaError(fmt::format("unknown role '{}'", role));
    }
    t.turns.push_back(
        {role == "user" ? Role::User : Role::Assistant, field<std::string>(turn, "text")});
  }
  t.flags.signal_present = field<bool>(j, "signal_present");
  t.flags.cost_ratio_framing = optional_field<double>(j, "cost_ratio_framing");
  t.flags.thinking = field<bool>(j, "thinking");
  return t;
}

std::string header_line() {
  return json{{"schema", "escalate.trial_records"}, {"version", kRecordSchemaVersion}}.dump();
}

void check_header(const std::string& line, const std::filesystem::path& path) {
  const json h = json::parse(line, nullptr, false);
  if (h.is_discarded() || !h.is_object() || h.value("schema", "") != "escalate.trial_records") {
    throw SchemaError(fmt::format("{}:1: not a trial record file (bad header)", path.string()));
  }
  const auto version = h.find("version");
  if (version == h.end() || !version->is_number_integer()) {
    throw SchemaError(fmt::format("{}:1: header has no schema version", path.string()));
  }
  if (version->get<int>() != kRecordSchemaVersion) {
    throw SchemaVersionError(fmt::format(
        "{}: record schema version {} is not supported (expected {}); migrate the file first",
        path.string(), version->get<int>(), kRecordSchemaVersion));
  }
}

struct TrialContext {
  const AgentSpec& agent;
  const ConditionConfig& condition;
  const RunOptions& options;
  std::uint64_t master_seed;
};

void run_simulated(const SimulatedAgentSpec& sim, const SignaledScenario& item,
                   TrialRecord& rec) {
  const double shown = rec.condition.signal_present ? rec.condition_accuracy
                                                    : sim.prior_self_accuracy;
  Rng outcome(derive_seed(rec.seed, 0));
  const bool correct = outcome.bernoulli(prediction_accuracy(sim, rec.condition_accuracy));
  const int label = item.scenario.label;
  rec.prediction = correct ? label : 1 - label;
  rec.prediction_correct = correct;
  const double perceived = perceive(sim, shown, derive_seed(rec.seed, 1));
  rec.decision = simulated_decision(sim, perceived, derive_seed(rec.seed, 2));
}

void run_protocol(const Responder& respond, const SignaledScenario& item, TrialRecord& rec,
                  bool keep_transcript) {
  const ConditionConfig& c = rec.condition;
  Transcript t = build_prediction_prompt(item.scenario,
                                         c.signal_present ? &item.signal : nullptr, c.thinking);
  auto finish = [&] {
    if (keep_transcript) rec.transcript = t;
  };

  QueryResult first = respond(t);
  if (!first.ok()) {
    rec.prediction = ParseFailure{"transport: " + first.failure};
    rec.decision = ParseFailure{"not reached: prediction turn failed"};
    return finish();
  }
  t = with_reply(std::move(t), *first.text);
  rec.prediction = parse_prediction(*first.text);
  if (const int* y = std::get_if<int>(&rec.prediction)) {
    rec.prediction_correct = *y == item.scenario.label;
  }

  t = build_escalation_prompt(std::move(t), c.cost_framing, c.framing);
  QueryResult second = respond(t);
  if (!second.ok()) {
    rec.decision = ParseFailure{"transport: " + second.failure};
    return finish();
  }
  t = with_reply(std::move(t), *second.text);
  rec.decision = parse_decision(*second.text);
  finish();
}

Responder default_responder(const AgentSpec& agent) {
  if (const auto* ext = std::get_if<ExternalAgentSpec>(&agent.kind)) {
    return [spec = *ext](const Transcript& t) { return query_external_agent(spec, t); };
  }
  if (const auto* rf = std::get_if<RuleFollowerSpec>(&agent.kind)) {
    return [spec = *rf](const Transcript& t) {
      QueryResult r;
      r.text = rule_follower_reply(spec, t);
      r.attempts = 1;
      return r;
    };
  }
  return {};
}

}  // namespace

ConditionConfig ConditionConfig::baseline() { return {}; }

ConditionConfig ConditionConfig::no_signal() {
  ConditionConfig c;
  c.name = "no-signal";
  c.signal_present = false;
  return c;
}

ConditionConfig ConditionConfig::cost_ratio(double ratio) {
  ConditionConfig c;
  c.name = fmt::format("cost-ratio-{}", format_ratio(ratio));
  c.cost_framing = ratio;
  return c;
}

ConditionConfig ConditionConfig::thinking_only() {
  ConditionConfig c;
  c.name = "thinking";
  c.thinking = true;
  c.sample_count = 50;
  return c;
}

ConditionConfig ConditionConfig::thinking_cost(double ratio) {
  ConditionConfig c = cost_ratio(ratio);
  c.name = fmt::format("thinking-cost-{}", format_ratio(ratio));
  c.thinking = true;
  c.sample_count = 50;
  return c;
}

void ConditionConfig::validate() const {
  if (name.empty()) throw ConstraintViolation("condition name is empty");
  if (sample_count == 0) throw ConstraintViolation("sample_count must be positive");
  if (cost_framing && !(*cost_framing > 1.0)) {
    throw ConstraintViolation("cost framing ratio must exceed 1");
  }
}

std::vector<ConditionConfig> standard_conditions() {
  return {ConditionConfig::baseline(), ConditionConfig::no_signal(),
          ConditionConfig::cost_ratio(4.0), ConditionConfig::thinking_only(),
          ConditionConfig::thinking_cost(4.0)};
}

json to_json(const ConditionConfig& c) {
  return {{"name", c.name},
          {"signal_present", c.signal_present},
          {"cost_framing", optional_json(c.cost_framing)},
          {"framing", std::string(to_string(c.framing))},
          {"thinking", c.thinking},
          {"sample_count", c.sample_count}};
}

ConditionConfig condition_from_json(const json& j) {
  ConditionConfig c;
  c.name = field<std::string>(j, "name");
  c.signal_present = field<bool>(j, "signal_present");
  c.cost_framing = optional_field<double>(j, "cost_framing");
  try {
    c.framing = parse_framing(field<std::string>(j, "framing"));
  } catch (const ConfigError& e) {
    throw SchemaError(e.what());
  }
  c.thinking = field<bool>(j, "thinking");
  c.sample_count = field<std::size_t>(j, "sample_count");
  return c;
}

json to_json(const AgentSpec& agent) {
  json j = {{"id", agent.id}};
  std::visit(
      [&](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, SimulatedAgentSpec>) {
          j["type"] = "simulated";
          j["threshold"] = spec.decision_threshold;
          j["bias"] = spec.bias;
          j["noise_sd"] = spec.noise_sd;
          if (const auto* l = std::get_if<LogisticResponse>(&spec.response)) {
            j["response"] = "logistic";
            j["slope"] = l->slope;
          } else {
            j["response"] = "step";
          }
          if (const auto* f = std::get_if<FixedAccuracy>(&spec.prediction_accuracy)) {
            j["prediction_accuracy"] = f->accuracy;
          } else {
            j["prediction_accuracy"] = "signal";
          }
          j["prior_self_accuracy"] = spec.prior_self_accuracy;
        } else if constexpr (std::is_same_v<T, ExternalAgentSpec>) {
          j["type"] = "external";
          j["endpoint"] = spec.endpoint_url;
          j["model"] = spec.model_identifier;
          j["timeout_ms"] = spec.timeout.count();
          j["max_retries"] = spec.max_retries;
          j["thinking"] = spec.thinking;
        } else {
          j["type"] = "rule-follower";
          j["hallucinated_accuracy"] = optional_json(spec.hallucinated_accuracy);
        }
      },
      agent.kind);
  return j;
}

AgentSpec agent_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("agent spec must be a JSON object");
  AgentSpec agent;
  try {
    agent.id = field<std::string>(j, "id");
    const auto type = field<std::string>(j, "type");
    if (type == "simulated") {
      SimulatedAgentSpec s;
      s.decision_threshold = j.value("threshold", s.decision_threshold);
      s.bias = j.value("bias", s.bias);
      s.noise_sd = j.value("noise_sd", s.noise_sd);
      const auto response = j.value("response", std::string("step"));
      if (response == "logistic") {
        s.response = LogisticResponse{j.value("slope", 10.0)};
      } else if (response != "step") {
        throw ConfigError(fmt::format("agent '{}': unknown response '{}'", agent.id, response));
      }
      if (auto it = j.find("prediction_accuracy"); it != j.end() && it->is_number()) {
        s.prediction_accuracy = FixedAccuracy{it->get<double>()};
      }
      s.prior_self_accuracy = j.value("prior_self_accuracy", s.prior_self_accuracy);
      s.validate();
      agent.kind = s;
    } else if (type == "external") {
      ExternalAgentSpec e;
      e.endpoint_url = field<std::string>(j, "endpoint");
      e.model_identifier = j.value("model", std::string());
      e.timeout = std::chrono::milliseconds(j.value("timeout_ms", 30000));
      e.max_retries = j.value("max_retries", 3);
      e.thinking = j.value("thinking", false);
      e.validate();
      agent.kind = e;
    } else if (type == "rule-follower") {
      RuleFollowerSpec r;
      if (j.contains("hallucinated_accuracy")) {
        r.hallucinated_accuracy = optional_field<double>(j, "hallucinated_accuracy");
      }
      agent.kind = r;
    } else {
      throw ConfigError(fmt::format("agent '{}': unknown type '{}'", agent.id, type));
    }
  } catch (const SchemaError& e) {
    throw ConfigError(fmt::format("agent spec: {}", e.what()));
  } catch (const ConstraintViolation& e) {
    throw ConfigError(fmt::format("agent '{}': {}", agent.id, e.what()));
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("agent '{}': {}", agent.id, e.what()));
  }
  return agent;
}

std::optional<Decision> TrialRecord::decided() const {
  if (const auto* d = std::get_if<Decision>(&decision)) return *d;
  return std::nullopt;
}

void TrialRecord::validate() const {
  if (signal_accuracy.has_value() != condition.signal_present) {
    throw SchemaError(fmt::format("trial '{}': signal_accuracy must be present iff the "
                                  "condition shows a signal",
                                  trial_id));
  }
  if (prediction_correct.has_value() != prediction_parsed()) {
    throw SchemaError(fmt::format(
        "trial '{}': prediction_correct must be set iff the prediction parsed", trial_id));
  }
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(condition_accuracy) || (signal_accuracy && !in_unit(*signal_accuracy))) {
    throw SchemaError(fmt::format("trial '{}': accuracy outside [0, 1]", trial_id));
  }
  if (const int* y = std::get_if<int>(&prediction); y && *y != 0 && *y != 1) {
    throw SchemaError(fmt::format("trial '{}': prediction must be 0 or 1", trial_id));
  }
}

json to_json(const TrialRecord& r) {
  json j = {{"trial_id", r.trial_id},
            {"agent_id", r.agent_id},
            {"dataset", std::string(to_string(r.dataset_kind))},
            {"scenario_id", r.scenario_id},
            {"condition", to_json(r.condition)},
            {"signal_accuracy", optional_json(r.signal_accuracy)},
            {"condition_accuracy", r.condition_accuracy},
            {"seed", r.seed}};
  if (const int* y = std::get_if<int>(&r.prediction)) {
    j["prediction"] = *y;
  } else {
    j["prediction"] = {{"failure", std::get<ParseFailure>(r.prediction).reason}};
  }
  j["prediction_correct"] = r.prediction_correct ? json(*r.prediction_correct) : json(nullptr);
  if (const auto* d = std::get_if<Decision>(&r.decision)) {
    j["decision"] = std::string(to_string(*d));
  } else {
    j["decision"] = {{"failure", std::get<ParseFailure>(r.decision).reason}};
  }
  j["timestamp"] = r.timestamp ? json(*r.timestamp) : json(nullptr);
  j["transcript"] = r.transcript ? to_json(*r.transcript) : json(nullptr);
  return j;
}

TrialRecord record_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("record is not a JSON object");
  TrialRecord r;
  r.trial_id = field<std::string>(j, "trial_id");
  r.agent_id = field<std::string>(j, "agent_id");
  try {
    r.dataset_kind = parse_dataset_kind(field<std::string>(j, "dataset"));
  } catch (const ConfigError& e) {
    throw SchemaError(e.what());
  }
  r.scenario_id = field<std::string>(j, "scenario_id");
  r.condition = condition_from_json(field<json>(j, "condition"));
  r.signal_accuracy = optional_field<double>(j, "signal_accuracy");
  r.condition_accuracy = field<double>(j, "condition_accuracy");
  r.seed = field<std::uint64_t>(j, "seed");

  const json& pred = field<json>(j, "prediction");
  if (pred.is_number_integer()) {
    r.prediction = pred.get<int>();
  } else {
    r.prediction = ParseFailure{field<std::string>(pred, "failure")};
  }
  r.prediction_correct = optional_field<bool>(j, "prediction_correct");
  const json& dec = field<json>(j, "decision");
  if (dec.is_string()) {
    const auto s = dec.get<std::string>();
    if (s == "implement") {
      r.decision = Decision::Implement;
    } else if (s == "escalate") {
      r.decision = Decision::Escalate;
    } else {
      throw SchemaError(fmt::format("unknown decision '{}'", s));
    }
  } else {
    r.decision = ParseFailure{field<std::string>(dec, "failure")};
  }
  r.timestamp = optional_field<std::string>(j, "timestamp");
  if (auto it = j.find("transcript"); it != j.end() && !it->is_null()) {
    r.transcript = transcript_from_json(*it);
  }
  r.validate();
  return r;
}

RecordWriter::RecordWriter(const std::filesystem::path& path) : path_(path) {
  out_.open(path, std::ios::out | std::ios::trunc | std::ios::binary);
  if (!out_) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out_ << header_line() << '\n';
  out_.flush();
}

void RecordWriter::submit(std::size_t index, const TrialRecord& record) {
  std::string line = to_json(record).dump();
  std::lock_guard lock(mu_);
  pending_.emplace(index, std::move(line));
  while (!pending_.empty() && pending_.begin()->first == next_) {
    out_ << pending_.begin()->second << '\n';
    pending_.erase(pending_.begin());
    ++next_;
  }
  out_.flush();
  if (!out_) throw IoError(fmt::format("write to '{}' failed", path_.string()));
}

std::size_t RecordWriter::written() const {
  std::lock_guard lock(mu_);
  return next_;
}

void persist_records(std::span<const TrialRecord> records, const std::filesystem::path& path) {
  RecordWriter writer(path);
  for (std::size_t i = 0; i < records.size(); ++i) writer.submit(i, records[i]);
}

std::vector<TrialRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaError(fmt::format("{}: empty file, no header", path.string()));
  }
  check_header(line, path);
  std::vector<TrialRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw SchemaError(fmt::format("{}:{}: malformed JSON", path.string(), line_no));
    }
    try {
      records.push_back(record_from_json(j));
    } catch (const SchemaError& e) {
      throw SchemaError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return records;
}

std::vector<std::size_t> draw_sample(std::size_t pool_size, const ConditionConfig& condition,
                                     std::uint64_t master_seed, bool paired) {
  if (condition.sample_count > pool_size) {
    throw ConfigError(fmt::format("condition '{}' needs {} scenarios but the pool has {}",
                                  condition.name, condition.sample_count, pool_size));
  }
  const std::uint64_t stream = paired ? kPairedDrawStream : fnv1a64(condition.name);
  Rng rng(derive_seed(master_seed, stream));
  std::vector<std::size_t> idx(pool_size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates: a smaller sample is a prefix of a larger one.
  for (std::size_t i = 0; i < condition.sample_count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool_size - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(condition.sample_count);
  return idx;
}

std::vector<TrialRecord> run_condition(const AgentSpec& agent,
                                       std::span<const SignaledScenario> pool,
                                       const ConditionConfig& condition,
                                       std::uint64_t master_seed, const RunOptions& options) {
  condition.validate();
  const std::vector<std::size_t> sample =
      draw_sample(pool.size(), condition, master_seed, options.paired);

  const auto* simulated = std::get_if<SimulatedAgentSpec>(&agent.kind);
  if (simulated) simulated->validate();
  if (const auto* ext = std::get_if<ExternalAgentSpec>(&agent.kind); ext && !options.responder) {
    ext->validate();
  }
  const Responder respond = options.responder ? options.responder : default_responder(agent);
  const bool stamp = std::holds_alternative<ExternalAgentSpec>(agent.kind);

  std::vector<TrialRecord> records(sample.size());
  auto run_one = [&](std::size_t i) {
    const SignaledScenario& item = pool[sample[i]];
    TrialRecord& rec = records[i];
    rec.trial_id = fmt::format("{}/{}/{:05}", agent.id, condition.name, i);
    rec.agent_id = agent.id;
    rec.dataset_kind = item.scenario.kind;
    rec.scenario_id = item.scenario.id;
    rec.condition = condition;
    rec.condition_accuracy = item.signal.displayed_accuracy();
    if (condition.signal_present) rec.signal_accuracy = rec.condition_accuracy;
    rec.seed = derive_seed(master_seed, i);
    if (simulated) {
      run_simulated(*simulated, item, rec);
    } else {
      run_protocol(respond, item, rec, options.keep_transcripts);
      if (stamp) rec.timestamp = utc_now();
    }
    if (options.sink) options.sink->submit(i, rec);
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, records.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < records.size(); ++i) run_one(i);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < records.size(); i = next++) {
        try {
          run_one(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
  return records;
}

json to_json(const RunManifest& m) {
  json conditions = json::array();
  for (const auto& c : m.conditions) conditions.push_back(to_json(c));
  return {{"command", m.command},
          {"agent", to_json(m.agent)},
          {"conditions", std::move(conditions)},
          {"master_seed", m.master_seed},
          {"paired", m.paired},
          {"sampling", m.sampling},
          {"dataset_hashes", m.dataset_hashes},
          {"settings", m.settings},
          {"record_schema_version", kRecordSchemaVersion}};
}

std::string write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  const std::string text = to_json(manifest).dump(2) + "\n";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write manifest '{}'", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
  return hex64(fnv1a64(text));
}

}  // namespace escalate
