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

#include "escalate/sft.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "escalate/analysis.hpp"
#include "escalate/error.hpp"
#include "escalate/report.hpp"
#include "escalate/rng.hpp"
#include "escalate/rule_follower.hpp"
#include "escalate/runner.hpp"

namespace escalate {

using nlohmann::json;

std::string generate_target(double p, double ratio) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConstraintViolation(fmt::format("accuracy must lie in [0, 1], got {}", p));
  }
  if (!(ratio > 1.0) || !std::isfinite(ratio)) {
    throw ConstraintViolation(fmt::format("cost ratio must exceed 1, got {}", ratio));
  }
  const int x = displayed_percent(p);
  const int y = 100 - x;
  // R * Y is formed first so integer-valued products stay exact and the
  // tie R (1 - p) = 1 is detected without rounding error.
  const double z = ratio * y / 100.0;
  const std::string r = format_ratio(ratio);
  std::string verdict;
  int decision;
  if (z > 1.0) {
    verdict = "which exceeds 1, the cost of escalating. Escalating is cheaper.";
    decision = 1;
  } else if (z < 1.0) {
    verdict = "which is below 1, the cost of escalating. Implementing is cheaper.";
    decision = 0;
  } else {
    verdict = "which equals 1, the cost of escalating. With no saving from escalating, I "
              "implement.";
    decision = 0;
  }
  return fmt::format(
      "The signal suggests an accuracy of {}%, so the error rate is {}%. The expected cost "
      "of implementing is {} × {}% = {:.2f}, {}\n\nDECISION: {}",
      x, y, r, y, z, verdict, decision);
}

std::vector<SftExample> generate_training_set(const ScenarioPools& pools,
                                              const SftGridConfig& config) {
  for (DatasetKind h : config.holdout) {
    if (std::find(config.datasets.begin(), config.datasets.end(), h) == config.datasets.end()) {
      throw ConfigError(
          fmt::format("holdout dataset {} is not among the configured datasets", to_string(h)));
    }
  }
  std::vector<DatasetKind> kept;
  for (DatasetKind d : config.datasets) {
    if (!config.holdout.count(d)) kept.push_back(d);
  }
  if (kept.empty() || config.framings.empty() || config.ratios.empty() || config.per_cell == 0) {
    throw ConfigError("the SFT grid is empty: no datasets, framings, ratios or samples remain");
  }
  for (double r : config.ratios) {
    if (!(r > 1.0)) throw ConfigError(fmt::format("cost ratio must exceed 1, got {}", r));
  }
  for (DatasetKind d : kept) {
    auto it = pools.find(d);
    if (it == pools.end() || it->second.empty()) {
      throw ConfigError(fmt::format("no scenarios available for {}", to_string(d)));
    }
  }

  const RuleFollowerSpec follower{};
  std::vector<SftExample> corpus;
  corpus.reserve(kept.size() * config.framings.size() * config.ratios.size() * config.per_cell);
  std::uint64_t cell = 0;
  for (DatasetKind d : kept) {
    const auto& pool = pools.at(d);
    for (FramingVariant framing : config.framings) {
      for (double ratio : config.ratios) {
        Rng rng(derive_seed(config.seed, cell++));
        for (std::size_t k = 0; k < config.per_cell; ++k) {
          const SignaledScenario& item = pool[rng.below(pool.size())];
          Transcript t = build_prediction_prompt(item.scenario, &item.signal);
          t = with_reply(std::move(t), rule_follower_reply(follower, t));
          t = build_escalation_prompt(std::move(t), ratio, framing);

          SftExample ex;
          ex.meta.dataset = d;
          ex.meta.cost_ratio = ratio;
          ex.meta.framing = framing;
          ex.meta.signal_accuracy = item.signal.displayed_accuracy();
          ex.meta.gold_decision =
              bayes_decision(ex.meta.signal_accuracy, CostModel::from_ratio(ratio));
          ex.meta.scenario_id = item.scenario.id;
          ex.target_text = generate_target(ex.meta.signal_accuracy, ratio);
          ex.transcript = std::move(t);
          corpus.push_back(std::move(ex));
        }
      }
    }
  }
  return corpus;
}

namespace {

json example_to_json(const SftExample& ex) {
  json messages = json::array();
  for (const auto& turn : ex.transcript.turns) {
    messages.push_back({{"role", std::string(to_string(turn.role))}, {"content", turn.text}});
  }
  return {{"messages", std::move(messages)},
          {"target", ex.target_text},
          {"meta",
           {{"dataset", std::string(to_string(ex.meta.dataset))},
            {"cost_ratio", ex.meta.cost_ratio},
            {"framing", std::string(to_string(ex.meta.framing))},
            {"signal_accuracy", ex.meta.signal_accuracy},
            {"gold_decision", static_cast<int>(ex.meta.gold_decision)},
            {"scenario_id", ex.meta.scenario_id}}}};
}

SftExample example_from_json(const json& j) {
  SftExample ex;
  for (const auto& m : j.at("messages")) {
    const auto role = m.at("role").get<std::string>();
    ex.transcript.turns.push_back(
        {role == "user" ? Role::User : Role::Assistant, m.at("content").get<std::string>()});
  }
  ex.target_text = j.at("target").get<std::string>();
  const json& meta = j.at("meta");
  ex.meta.dataset = parse_dataset_kind(meta.at("dataset").get<std::string>());
  ex.meta.cost_ratio = meta.at("cost_ratio").get<double>();
  ex.meta.framing = parse_framing(meta.at("framing").get<std::string>());
  ex.meta.signal_accuracy = meta.at("signal_accuracy").get<double>();
  ex.meta.gold_decision =
      meta.at("gold_decision").get<int>() == 1 ? Decision::Escalate : Decision::Implement;
  ex.meta.scenario_id = meta.at("scenario_id").get<std::string>();
  ex.transcript.flags.signal_present = true;
  ex.transcript.flags.cost_ratio_framing = ex.meta.cost_ratio;
  return ex;
}

}  // namespace

void write_corpus(std::span<const SftExample> corpus, const std::string& path) {
  std::string text;
  for (const auto& ex : corpus) {
    text += example_to_json(ex).dump();
    text += '\n';
  }
  write_text(path, text);
}

std::vector<SftExample> read_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  std::vector<SftExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(example_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw SchemaError(fmt::format("{}:{}: {}", path, line_no, e.what()));
    }
  }
  return out;
}

RuleFollowerTable evaluate_rule_follower(const AgentSpec& agent, const ScenarioPools& pools,
                                         const EvalGrid& grid, bool signal_present) {
  if (grid.datasets.empty() || grid.framings.empty() || grid.ratios.empty() ||
      grid.samples_per_ratio == 0) {
    throw ConfigError("the evaluation grid is empty");
  }
  RuleFollowerTable table;
  table.datasets = grid.datasets;
  table.framings = grid.framings;
  table.trained = grid.trained;
  table.signal_present = signal_present;
  std::uint64_t cell = 0;
  for (DatasetKind d : grid.datasets) {
    auto it = pools.find(d);
    if (it == pools.end()) {
      throw ConfigError(fmt::format("no scenarios available for {}", to_string(d)));
    }
    for (FramingVariant framing : grid.framings) {
      for (double ratio : grid.ratios) {
        const CostModel cost = CostModel::from_ratio(ratio);
        ConditionConfig c;
        c.name = fmt::format("{}-{}-r{}", to_string(d), to_string(framing), format_ratio(ratio));
        c.signal_present = signal_present;
        c.cost_framing = ratio;
        c.framing = framing;
        c.sample_count = grid.samples_per_ratio;
        RunOptions run;
        run.keep_transcripts = false;
        const auto records = run_condition(agent, it->second, c, derive_seed(grid.seed, cell++),
                                           run);
        const auto correct = static_cast<std::size_t>(
            std::llround(score_policy(records, cost) * static_cast<double>(records.size())));
        auto& by_cell = table.cells[{d, framing}];
        by_cell.correct += correct;
        by_cell.total += records.size();
        auto& by_ratio = table.by_ratio[{d, ratio}];
        by_ratio.correct += correct;
        by_ratio.total += records.size();
      }
    }
  }
  return table;
}

void write_rule_follower_csv(const RuleFollowerTable& table, const std::string& path) {
  auto title = [](FramingVariant v) {
    std::string s(to_string(v));
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
  };
  std::string text = "Dataset";
  for (FramingVariant v : table.framings) text += "," + title(v);
  text += ",Trained?\n";
  for (DatasetKind d : table.datasets) {
    text += std::string(to_string(d));
    for (FramingVariant v : table.framings) {
      const auto it = table.cells.find({d, v});
      const double acc = it == table.cells.end() ? 0.0 : it->second.accuracy();
      text += fmt::format(",{:.1f}%", 100.0 * acc);
    }
    text += table.trained.count(d) ? ",Yes\n" : ",No\n";
  }
  write_text(path, text);
}

}  // namespace escalate
