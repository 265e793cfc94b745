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

#include "escalate/archive.hpp"

#include <fstream>

#include <fmt/format.h>

#include "escalate/error.hpp"
#include "escalate/report.hpp"

namespace escalate {

using nlohmann::json;

namespace {

std::string header(std::string_view kind, const json& extra = json::object()) {
  json h = {{"schema", fmt::format("escalate.{}", kind)}, {"version", kArchiveSchemaVersion}};
  h.update(extra);
  return h.dump();
}

template <typename F>
void read_lines(const std::filesystem::path& path, std::string_view kind, F&& on_record,
                json* header_out = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(fmt::format("{}: empty archive", path.string()));
  const json h = json::parse(line, nullptr, false);
  const std::string expected = fmt::format("escalate.{}", kind);
  if (h.is_discarded() || !h.is_object() || h.value("schema", "") != expected) {
    throw SchemaError(fmt::format("{}:1: expected a '{}' archive header", path.string(), expected));
  }
  if (h.value("version", -1) != kArchiveSchemaVersion) {
    throw SchemaError(fmt::format("{}:1: unsupported archive version", path.string()));
  }
  if (header_out) *header_out = h;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      on_record(json::parse(line));
    } catch (const std::exception& e) {
      throw SchemaError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
}

void write_lines(const std::filesystem::path& path, const std::string& head,
                 const std::vector<json>& rows) {
  std::string text = head + "\n";
  for (const auto& r : rows) {
    text += r.dump();
    text += '\n';
  }
  write_text(path, text);
}

}  // namespace

json to_json(const Scenario& s) {
  json features = json::object();
  for (const auto& [k, v] : s.features) {
    if (const double* d = std::get_if<double>(&v)) {
      features[k] = *d;
    } else {
      features[k] = std::get<std::string>(v);
    }
  }
  return {{"id", s.id},
          {"kind", std::string(to_string(s.kind))},
          {"features", std::move(features)},
          {"label", s.label}};
}

Scenario scenario_from_json(const json& j) {
  FeatureMap f;
  for (const auto& [k, v] : j.at("features").items()) {
    if (v.is_number()) {
      f[k] = v.get<double>();
    } else {
      f[k] = v.get<std::string>();
    }
  }
  return make_scenario(j.at("id").get<std::string>(),
                       parse_dataset_kind(j.at("kind").get<std::string>()), std::move(f),
                       j.at("label").get<int>());
}

json to_json(const Stump& s) {
  json j = {{"feature", s.feature_name},
            {"majority_label", s.majority_label},
            {"leaf_accuracy", s.leaf_accuracy},
            {"support", s.support}};
  if (const auto* n = std::get_if<NumericSplit>(&s.predicate)) {
    j["split"] = {{"type", "numeric"}, {"threshold", n->threshold}, {"at_least", n->at_least}};
  } else {
    j["split"] = {{"type", "categorical"},
                  {"values", std::get<CategoricalSplit>(s.predicate).values}};
  }
  return j;
}

Stump stump_from_json(const json& j) {
  Stump s;
  s.feature_name = j.at("feature").get<std::string>();
  s.majority_label = j.at("majority_label").get<int>();
  s.leaf_accuracy = j.at("leaf_accuracy").get<double>();
  s.support = j.at("support").get<std::size_t>();
  const json& split = j.at("split");
  const auto type = split.at("type").get<std::string>();
  if (type == "numeric") {
    s.predicate = NumericSplit{split.at("threshold").get<double>(),
                               split.at("at_least").get<bool>()};
  } else if (type == "categorical") {
    s.predicate = CategoricalSplit{split.at("values").get<std::vector<std::string>>()};
  } else {
    throw SchemaError(fmt::format("unknown split type '{}'", type));
  }
  if (s.majority_label != 0 && s.majority_label != 1) throw SchemaError("bad majority label");
  return s;
}

void write_scenarios(std::span<const Scenario> scenarios, const std::filesystem::path& path) {
  std::vector<json> rows;
  rows.reserve(scenarios.size());
  for (const auto& s : scenarios) rows.push_back(to_json(s));
  write_lines(path, header("scenarios"), rows);
}

std::vector<Scenario> read_scenarios(const std::filesystem::path& path) {
  std::vector<Scenario> out;
  read_lines(path, "scenarios", [&](const json& j) { out.push_back(scenario_from_json(j)); });
  return out;
}

void write_stumps(std::span<const Stump> stumps, DatasetKind kind,
                  const std::filesystem::path& path) {
  std::vector<json> rows;
  for (const auto& s : stumps) rows.push_back(to_json(s));
  write_lines(path, header("stumps", {{"kind", std::string(to_string(kind))}}), rows);
}

std::vector<Stump> read_stumps(const std::filesystem::path& path, DatasetKind kind) {
  std::vector<Stump> out;
  json h;
  read_lines(path, "stumps", [&](const json& j) { out.push_back(stump_from_json(j)); }, &h);
  if (h.value("kind", "") != to_string(kind)) {
    throw SchemaError(fmt::format("{}: stumps belong to {}, not {}", path.string(),
                                  h.value("kind", "?"), to_string(kind)));
  }
  return out;
}

void write_signaled(std::span<const SignaledScenario> items, const std::filesystem::path& path) {
  std::vector<json> rows;
  rows.reserve(items.size());
  for (const auto& item : items) {
    json j = to_json(item.scenario);
    j["signal"] = to_json(item.signal.stump);
    j["signal"]["accuracy"] = item.signal.accuracy;
    j["signal"]["sentence"] = item.signal.rendered_sentence;
    rows.push_back(std::move(j));
  }
  write_lines(path, header("signaled_scenarios"), rows);
}

std::vector<SignaledScenario> read_signaled(const std::filesystem::path& path) {
  std::vector<SignaledScenario> out;
  read_lines(path, "signaled_scenarios", [&](const json& j) {
    SignaledScenario item;
    item.scenario = scenario_from_json(j);
    const json& sj = j.at("signal");
    item.signal = make_signal(stump_from_json(sj), item.scenario.kind);
    if (sj.value("sentence", "") != item.signal.rendered_sentence) {
      throw SchemaError("stored signal sentence does not match its stump");
    }
    out.push_back(std::move(item));
  });
  return out;
}

}  // namespace escalate
