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

#include "escalate/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "escalate/analysis.hpp"
#include "escalate/archive.hpp"
#include "escalate/characterize.hpp"
#include "escalate/error.hpp"
#include "escalate/hash.hpp"
#include "escalate/rng.hpp"
#include "escalate/report.hpp"
#include "escalate/runner.hpp"
#include "escalate/sft.hpp"
#include "escalate/synthetic.hpp"

namespace escalate {
namespace {

namespace fs = std::filesystem;

// Bad invocation detected after parsing; exits with kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string pct(double v) { return fmt::format("{:.1f}%", 100.0 * v); }

std::vector<AgentSpec> builtin_agents() {
  auto simulated = [](std::string id, auto&& tweak) {
    SimulatedAgentSpec s;
    tweak(s);
    return AgentSpec{std::move(id), s};
  };
  return {
      {"omniscient", omniscient_agent(CostModel::from_ratio(4.0))},
      simulated("step-75", [](SimulatedAgentSpec&) {}),
      simulated("cautious-85", [](SimulatedAgentSpec& s) { s.decision_threshold = 0.85; }),
      simulated("aggressive-55", [](SimulatedAgentSpec& s) { s.decision_threshold = 0.55; }),
      simulated("logistic-75", [](SimulatedAgentSpec& s) { s.response = LogisticResponse{10.0}; }),
      simulated("biased", [](SimulatedAgentSpec& s) { s.bias = 0.1; }),
      simulated("overconfident",
                [](SimulatedAgentSpec& s) {
                  s.prior_self_accuracy = 0.9;
                  s.prediction_accuracy = FixedAccuracy{0.78};
                }),
      simulated("underconfident",
                [](SimulatedAgentSpec& s) {
                  s.prior_self_accuracy = 0.6;
                  s.prediction_accuracy = FixedAccuracy{0.78};
                }),
      {"rule-follower", RuleFollowerSpec{}},
      {"rule-follower-strict", RuleFollowerSpec{std::nullopt}},
  };
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(fmt::format("cannot read '{}'", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

AgentSpec resolve_agent(const std::string& id, const std::string& agents_file) {
  if (!agents_file.empty()) {
    const auto j = nlohmann::json::parse(read_file(agents_file), nullptr, false);
    if (j.is_discarded()) throw ConfigError(fmt::format("'{}' is not valid JSON", agents_file));
    const nlohmann::json& list = j.is_object() && j.contains("agents") ? j["agents"] : j;
    if (!list.is_array()) throw ConfigError("agents file must hold an array of agent specs");
    for (const auto& entry : list) {
      AgentSpec a = agent_from_json(entry);
      if (a.id == id) return a;
    }
  }
  for (auto& a : builtin_agents()) {
    if (a.id == id) return a;
  }
  throw ConfigError(fmt::format("unknown agent id '{}'", id));
}

std::vector<DatasetKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<DatasetKind> kinds;
  for (const auto& n : names) kinds.push_back(parse_dataset_kind(n));
  return kinds;
}

std::string archive_name(DatasetKind kind, std::string_view what) {
  std::string k(to_string(kind));
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
  return fmt::format("{}.{}.jsonl", k, what);
}

struct PoolSource {
  std::string archive_dir;
  std::size_t synthetic_per_bin = 250;
  std::vector<std::string> datasets;
};

// Pools by dataset kind plus the hashes that identify them.
ScenarioPools load_pools(const PoolSource& src, std::uint64_t seed,
                         std::map<std::string, std::string>& hashes) {
  std::vector<DatasetKind> kinds = src.datasets.empty()
                                       ? std::vector<DatasetKind>(kAllDatasetKinds.begin(),
                                                                  kAllDatasetKinds.end())
                                       : parse_kinds(src.datasets);
  ScenarioPools pools;
  if (src.archive_dir.empty()) {
    PoolSpec spec;
    spec.kinds = kinds;
    spec.per_bin = src.synthetic_per_bin;
    spec.seed = seed;
    for (auto& item : synthetic_pool(spec)) pools[item.scenario.kind].push_back(std::move(item));
    hashes["synthetic"] = fmt::format("seed={} per_bin={}", seed, src.synthetic_per_bin);
    return pools;
  }
  if (!fs::is_directory(src.archive_dir)) {
    throw UsageError(fmt::format("archive directory '{}' does not exist", src.archive_dir));
  }
  for (DatasetKind kind : kinds) {
    const fs::path file = fs::path(src.archive_dir) / archive_name(kind, "signaled");
    if (!fs::exists(file)) {
      if (!src.datasets.empty()) {
        throw UsageError(fmt::format("no signal archive '{}'", file.string()));
      }
      continue;
    }
    pools[kind] = read_signaled(file);
    hashes[file.filename().string()] = hash_file(file.string());
  }
  if (pools.empty()) {
    throw UsageError(fmt::format("no signal archives found in '{}'", src.archive_dir));
  }
  return pools;
}

std::vector<SignaledScenario> flatten(const ScenarioPools& pools) {
  std::vector<SignaledScenario> all;
  for (const auto& [kind, items] : pools) all.insert(all.end(), items.begin(), items.end());
  return all;
}

void add_pool_options(CLI::App* cmd, PoolSource& src) {
  cmd->add_option("--archive", src.archive_dir,
                  "Directory with <dataset>.signaled.jsonl archives from ingest");
  cmd->add_option("--synthetic-per-bin", src.synthetic_per_bin,
                  "Without --archive: synthetic scenarios per 5-point accuracy bin")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--datasets", src.datasets, "Restrict to these datasets");
}

// ingest --------------------------------------------------------------------

struct IngestArgs {
  std::string dataset;
  std::string input;
  std::string out = "archives";
  std::string manifest;
  std::uint64_t seed = 0;
  std::size_t per_class = 10000;
  std::size_t sample_size = 0;
  std::size_t max_ratings = 1000000;
  std::size_t max_pairs = 0;
  std::size_t min_support = 200;
  double train_fraction = 0.7;
  int quantiles = 10;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  const DatasetKind kind = parse_dataset_kind(a.dataset);
  if (!fs::exists(a.input)) {
    throw UsageError(fmt::format("input path '{}' does not exist", a.input));
  }
  const DatasetManifest manifest =
      a.manifest.empty() ? default_manifest(kind) : load_manifest(a.manifest);
  SampleSpec spec;
  spec.per_class = a.per_class;
  spec.sample_size = a.sample_size;
  spec.max_ratings = a.max_ratings;
  spec.max_pairs = a.max_pairs;
  IngestResult r = ingest_dataset(a.input, kind, spec, a.seed, manifest);
  for (const auto& d : r.diagnostics) out << "note: " << d << '\n';

  std::size_t ones = 0;
  for (const auto& s : r.scenarios) ones += s.label == 1;
  out << fmt::format("{}: {} scenarios ({}/{})\n", to_string(kind), r.scenarios.size(), ones,
                     r.scenarios.size() - ones);

  std::vector<Stump> stumps;
  std::uint64_t stream = 0;
  for (const auto& feature : manifest.signal_features) {
    SplitCandidates candidates = QuantileCandidates{a.quantiles, -1};
    if (!r.scenarios.empty()) {
      auto it = r.scenarios.front().features.find(feature);
      if (it != r.scenarios.front().features.end() &&
          std::holds_alternative<std::string>(it->second)) {
        candidates = CategoryCandidates{};
      }
    }
    StumpOptions opts;
    opts.train_fraction = a.train_fraction;
    opts.min_support = a.min_support;
    opts.seed = derive_seed(a.seed, ++stream);
    auto trained = train_stump(r.scenarios, feature, candidates, opts);
    for (const auto& d : trained.diagnostics) out << "note: " << d << '\n';
    stumps.insert(stumps.end(), trained.stumps.begin(), trained.stumps.end());
  }
  order_by_specificity(stumps);

  std::vector<SignaledScenario> signaled;
  std::size_t unassigned = 0;
  for (const auto& s : r.scenarios) {
    try {
      signaled.push_back({s, assign_signal(s, stumps).signal});
    } catch (const AssignmentError&) {
      ++unassigned;
    }
  }
  out << fmt::format("{} stumps; {} scenarios with a signal, {} without\n", stumps.size(),
                     signaled.size(), unassigned);

  fs::create_directories(a.out);
  const fs::path scen = fs::path(a.out) / archive_name(kind, "scenarios");
  const fs::path stmp = fs::path(a.out) / archive_name(kind, "stumps");
  const fs::path sig = fs::path(a.out) / archive_name(kind, "signaled");
  write_scenarios(r.scenarios, scen);
  write_stumps(stumps, kind, stmp);
  write_signaled(signaled, sig);
  for (const auto& p : {scen, stmp, sig}) {
    out << fmt::format("wrote {} ({})\n", p.string(), hash_file(p.string()));
  }
  return kExitOk;
}

// characterize --------------------------------------------------------------

struct CharacterizeArgs {
  std::string agent;
  std::string agents_file;
  PoolSource pool;
  std::string out = "characterize-out";
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  double bin_width = 0.05;
  bool weighted = false;
  bool unpaired = false;
  std::size_t samples = 250;
  std::size_t thinking_samples = 50;
  double ratio = 4.0;
  std::string framing = "original";
};

void print_report(std::ostream& out, const CharacterizationReport& r) {
  out << fmt::format("  [{}] p* = {}", r.scope, r.implicit_threshold.display());
  if (r.self_estimate.value) {
    out << fmt::format(", a-hat = {}{}", pct(*r.self_estimate.value),
                       r.self_estimate.clamped ? " (clamped)" : "");
  } else {
    out << ", a-hat = undefined";
  }
  out << fmt::format(", actual = {}", pct(r.actual_accuracy));
  if (auto gap = r.calibration_gap()) {
    out << fmt::format(", gap = {:+.1f} pts, overconfident = {}", 100.0 * *gap,
                       *r.overconfident() ? "true" : "false");
  }
  out << '\n';
}

int cmd_characterize(const CharacterizeArgs& a, std::ostream& out) {
  const AgentSpec agent = resolve_agent(a.agent, a.agents_file);
  std::map<std::string, std::string> hashes;
  const auto all = flatten(load_pools(a.pool, a.seed, hashes));

  CharacterizeOptions opts;
  opts.master_seed = a.seed;
  opts.bin_width = a.bin_width;
  opts.weighting = a.weighted ? FitWeighting::ByCount : FitWeighting::Unweighted;
  opts.run.jobs = a.jobs;
  opts.run.paired = !a.unpaired;
  opts.conditions = {ConditionConfig::baseline(), ConditionConfig::no_signal(),
                     ConditionConfig::cost_ratio(a.ratio), ConditionConfig::thinking_only(),
                     ConditionConfig::thinking_cost(a.ratio)};
  for (auto& c : opts.conditions) {
    c.sample_count = c.thinking ? a.thinking_samples : a.samples;
    c.framing = parse_framing(a.framing);
  }

  const fs::path dir(a.out);
  fs::create_directories(dir / "records");
  opts.record_dir = dir / "records";

  RunManifest m;
  m.command = "characterize";
  m.agent = agent;
  m.conditions = opts.conditions;
  m.master_seed = a.seed;
  m.paired = opts.run.paired;
  m.dataset_hashes = hashes;
  m.settings = {{"bin_width", fmt::format("{}", a.bin_width)},
                {"weighting", std::string(to_string(opts.weighting))},
                {"fit_scope", "pooled"}};
  const std::string manifest_hash = write_manifest(m, dir / "manifest.json");
  out << fmt::format("manifest {} ({})\n", (dir / "manifest.json").string(), manifest_hash);

  const Characterization result = characterize(agent, all, opts);
  for (const auto& run : result.runs) {
    std::size_t failures = 0;
    for (const auto& r : run.records) failures += !r.decision_parsed();
    out << fmt::format("{}: {} trials, escalation rate {}, {} unparsed\n", run.condition.name,
                       run.records.size(), pct(escalation_rate(run.records)), failures);
  }
  for (const auto& n : result.notes) out << "note: " << n << '\n';

  CurveReport curve{fmt::format("{}: escalation curve (baseline)", agent.id), result.curve,
                    result.threshold, manifest_hash};
  emit_report(curve, ReportFormat::Csv, dir / "curve.csv");
  emit_report(curve, ReportFormat::Svg, dir / "curve.svg");
  std::vector<CharacterizationReport> reports{result.pooled};
  reports.insert(reports.end(), result.per_dataset.begin(), result.per_dataset.end());
  emit_summary(reports, manifest_hash, dir / "summary.csv");

  out << fmt::format("{} (fit {}, pooled across datasets):\n", agent.id,
                     to_string(opts.weighting));
  for (const auto& r : reports) print_report(out, r);
  out << fmt::format("wrote {}, {}, {}\n", (dir / "curve.csv").string(),
                     (dir / "curve.svg").string(), (dir / "summary.csv").string());
  return kExitOk;
}

// score ---------------------------------------------------------------------

struct ScoreArgs {
  std::vector<std::string> records;
  double ratio = 4.0;
};

int cmd_score(const ScoreArgs& a, std::ostream& out) {
  const CostModel cost = CostModel::from_ratio(a.ratio);
  out << fmt::format("tau* = {} at R = {}\n", pct(optimal_threshold(cost)),
                     format_ratio(a.ratio));
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<TrialRecord>> groups;
  for (const auto& path : a.records) {
    for (auto& r : load_records(path)) {
      auto key = std::pair{r.agent_id, r.condition.name};
      auto [it, fresh] = groups.try_emplace(key);
      if (fresh) order.push_back(key);
      it->second.push_back(std::move(r));
    }
  }
  if (order.empty()) throw UsageError("no records to score");
  out << "agent\tcondition\taccuracy\tn\tunparsed\n";
  for (const auto& key : order) {
    const auto& recs = groups[key];
    std::size_t failures = 0;
    for (const auto& r : recs) failures += !r.decision_parsed();
    out << fmt::format("{}\t{}\t{}\t{}\t{}\n", key.first, key.second,
                       pct(score_policy(recs, cost)), recs.size(), failures);
  }
  return kExitOk;
}

// sftgen --------------------------------------------------------------------

struct SftArgs {
  PoolSource pool{{}, 40, {}};
  std::string out = "sft_corpus.jsonl";
  std::uint64_t seed = 0;
  std::size_t per_cell = 50;
  std::vector<double> ratios = kSftRatios;
  std::vector<std::string> framings = {"original", "dollar", "wording", "fourth"};
  std::vector<std::string> holdout = {"MovieLens"};
  bool no_holdout = false;
  std::string eval_agent;
  std::string agents_file;
  std::string eval_out = "sft_eval.csv";
  bool no_signal = false;
  std::size_t eval_samples = 50;
};

int cmd_sftgen(const SftArgs& a, std::ostream& out) {
  for (double r : a.ratios) {
    if (!(r > 1.0)) throw ConstraintViolation(fmt::format("cost ratio must exceed 1, got {}", r));
  }
  std::map<std::string, std::string> hashes;
  const ScenarioPools pools = load_pools(a.pool, a.seed, hashes);

  SftGridConfig grid;
  grid.datasets.clear();
  for (const auto& [kind, _] : pools) grid.datasets.push_back(kind);
  grid.framings.clear();
  for (const auto& f : a.framings) grid.framings.push_back(parse_framing(f));
  grid.ratios = a.ratios;
  grid.holdout.clear();
  if (!a.no_holdout) {
    // A holdout outside the loaded datasets is rejected by the grid builder.
    for (DatasetKind k : parse_kinds(a.holdout)) grid.holdout.insert(k);
  }
  grid.per_cell = a.per_cell;
  grid.seed = a.seed;

  const auto corpus = generate_training_set(pools, grid);
  write_corpus(corpus, a.out);
  const std::size_t kept = grid.datasets.size() - grid.holdout.size();
  out << fmt::format("{} datasets × {} framings × {} ratios, {} per cell: {} examples\n", kept,
                     grid.framings.size(), grid.ratios.size(), grid.per_cell, corpus.size());
  std::vector<std::string> held;
  for (DatasetKind k : grid.holdout) held.emplace_back(to_string(k));
  out << fmt::format("holdout: {}\n", held.empty() ? "none" : fmt::format("{}", fmt::join(held, ", ")));
  for (double r : grid.ratios) {
    out << fmt::format("R = {}: tau* = {}\n", format_ratio(r),
                       pct(optimal_threshold(CostModel::from_ratio(r))));
  }
  out << fmt::format("wrote {} ({})\n", a.out, hash_file(a.out));

  if (!a.eval_agent.empty()) {
    const AgentSpec agent = resolve_agent(a.eval_agent, a.agents_file);
    EvalGrid eval;
    eval.datasets = std::vector<DatasetKind>();
    for (const auto& [kind, _] : pools) eval.datasets.push_back(kind);
    eval.framings = grid.framings;
    eval.ratios = grid.ratios;
    eval.samples_per_ratio = a.eval_samples;
    eval.seed = a.seed;
    eval.trained.clear();
    for (DatasetKind k : eval.datasets) {
      if (!grid.holdout.count(k)) eval.trained.insert(k);
    }
    const auto table = evaluate_rule_follower(agent, pools, eval, !a.no_signal);
    write_rule_follower_csv(table, a.eval_out);
    out << fmt::format("{} on {} prompts:\n", agent.id,
                       a.no_signal ? "no-signal" : "signal");
    for (DatasetKind d : table.datasets) {
      out << "  " << to_string(d);
      for (FramingVariant f : table.framings) {
        out << fmt::format("  {} {}", to_string(f), pct(table.cells.at({d, f}).accuracy()));
      }
      out << '\n';
    }
    out << fmt::format("wrote {}\n", a.eval_out);
  }
  return kExitOk;
}

// report --------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> records;
  std::string format = "csv";
  std::string out;
  std::string summary;
  std::string manifest;
  std::string title = "Escalation curve";
  double bin_width = 0.05;
  bool weighted = false;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const ReportFormat format = parse_report_format(a.format);
  std::vector<TrialRecord> records;
  std::string joined;
  for (const auto& path : a.records) {
    auto loaded = load_records(path);
    records.insert(records.end(), loaded.begin(), loaded.end());
    joined += hash_file(path);
  }
  const std::string hash =
      a.manifest.empty() ? hex64(fnv1a64(joined)) : hash_file(a.manifest);
  const auto weighting = a.weighted ? FitWeighting::ByCount : FitWeighting::Unweighted;

  std::vector<TrialRecord> signal, none;
  for (auto& r : records) {
    const bool plain = !r.condition.cost_framing && !r.condition.thinking;
    if (!plain) continue;
    (r.condition.signal_present ? signal : none).push_back(r);
  }
  const EscalationCurve curve = escalation_curve(signal, a.bin_width);
  const ImplicitThreshold threshold = try_fit(curve, weighting);
  emit_report(CurveReport{a.title, curve, threshold, hash}, format, a.out);
  out << fmt::format("{} curve points ({} empty bins, {} unparsed excluded); p* = {}\n",
                     curve.points.size(), curve.empty_bins.size(), curve.excluded_failures,
                     threshold.display());
  out << fmt::format("wrote {}\n", a.out);
  if (!a.summary.empty()) {
    std::vector<CharacterizationReport> reports;
    std::map<std::string, std::pair<std::vector<TrialRecord>, std::vector<TrialRecord>>> by_agent;
    for (auto& r : signal) by_agent[r.agent_id].first.push_back(r);
    for (auto& r : none) by_agent[r.agent_id].second.push_back(r);
    for (const auto& [id, parts] : by_agent) {
      reports.push_back(characterize_records(id, "pooled", parts.first, parts.second,
                                             a.bin_width, weighting));
    }
    emit_summary(reports, hash, a.summary);
    out << fmt::format("wrote {}\n", a.summary);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Measure and align escalation behaviour of decision agents", "escalate"};
  app.set_config("--config", "", "TOML config file; command-line flags override it");
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Sample a dataset, train stumps, assign signals");
  c_ingest->add_option("--dataset", ingest.dataset, "HotelBookings, LendingClub, "
                       "WikipediaToxicity or MovieLens")->required();
  c_ingest->add_option("--input", ingest.input,
                       "CSV file, or the directory holding the MovieLens files")->required();
  c_ingest->add_option("--out", ingest.out, "Archive directory")->capture_default_str();
  c_ingest->add_option("--manifest", ingest.manifest, "Column manifest overriding the default");
  c_ingest->add_option("--seed", ingest.seed, "Master seed")->capture_default_str();
  c_ingest->add_option("--per-class", ingest.per_class, "LendingClub rows per label")
      ->capture_default_str();
  c_ingest->add_option("--sample-size", ingest.sample_size,
                       "Uniform sample size for HotelBookings/WikipediaToxicity; 0 keeps all")
      ->capture_default_str();
  c_ingest->add_option("--max-ratings", ingest.max_ratings, "MovieLens rating budget")
      ->capture_default_str();
  c_ingest->add_option("--max-pairs", ingest.max_pairs, "MovieLens item cap; 0 for none")
      ->capture_default_str();
  c_ingest->add_option("--min-support", ingest.min_support, "Held-out rows a leaf needs")
      ->capture_default_str();
  c_ingest->add_option("--train-fraction", ingest.train_fraction, "Stump training share")
      ->check(CLI::Range(0.05, 0.95))
      ->capture_default_str();
  c_ingest->add_option("--quantiles", ingest.quantiles, "Candidate thresholds per feature")
      ->check(CLI::Range(2, 100))
      ->capture_default_str();

  CharacterizeArgs ch;
  auto* c_char = app.add_subcommand("characterize",
                                    "Run the five conditions and report p*, a-hat and the gap");
  c_char->add_option("--agent", ch.agent, "Agent id (built-in preset or from --agents)")
      ->required();
  c_char->add_option("--agents", ch.agents_file, "JSON file with agent specs");
  add_pool_options(c_char, ch.pool);
  c_char->add_option("--out", ch.out, "Output directory")->capture_default_str();
  c_char->add_option("--seed", ch.seed, "Master seed")->capture_default_str();
  c_char->add_option("--jobs", ch.jobs, "Concurrent trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_char->add_option("--bin-width", ch.bin_width, "Accuracy bin width")->capture_default_str();
  c_char->add_flag("--weighted", ch.weighted, "Weight the fit by bin counts");
  c_char->add_flag("--unpaired", ch.unpaired, "Draw scenarios separately per condition");
  c_char->add_option("--samples", ch.samples, "Scenarios per standard condition")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_char->add_option("--thinking-samples", ch.thinking_samples,
                     "Scenarios per thinking condition")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_char->add_option("--ratio", ch.ratio, "Cost ratio stated in the framed conditions")
      ->capture_default_str();
  c_char->add_option("--framing", ch.framing, "original, dollar, wording or fourth")
      ->capture_default_str();

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Score decisions against the cost-optimal rule");
  c_score->add_option("--records", score.records, "Record files")
      ->required()
      ->check(CLI::ExistingFile);
  c_score->add_option("--ratio", score.ratio, "Cost ratio R = c_w / c_l")->capture_default_str();

  SftArgs sft;
  auto* c_sft = app.add_subcommand("sftgen", "Generate the chain-of-thought training corpus");
  add_pool_options(c_sft, sft.pool);
  c_sft->add_option("--out", sft.out, "Corpus path (JSON lines)")->capture_default_str();
  c_sft->add_option("--seed", sft.seed, "Master seed")->capture_default_str();
  c_sft->add_option("--per-cell", sft.per_cell, "Examples per dataset x framing x ratio")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_sft->add_option("--ratios", sft.ratios, "Cost ratios")->capture_default_str();
  c_sft->add_option("--framings", sft.framings, "Framing variants")->capture_default_str();
  c_sft->add_option("--holdout", sft.holdout, "Datasets kept out of the corpus")
      ->capture_default_str();
  c_sft->add_flag("--no-holdout", sft.no_holdout, "Use every dataset");
  c_sft->add_option("--eval-agent", sft.eval_agent, "Also evaluate this agent on the grid");
  c_sft->add_option("--agents", sft.agents_file, "JSON file with agent specs");
  c_sft->add_option("--eval-out", sft.eval_out, "Evaluation table (CSV)")->capture_default_str();
  c_sft->add_option("--eval-samples", sft.eval_samples, "Samples per dataset, framing and R")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_sft->add_flag("--no-signal", sft.no_signal, "Evaluate on prompts without the signal");

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "Render a curve and summary from record files");
  c_rep->add_option("--records", rep.records, "Record files")
      ->required()
      ->check(CLI::ExistingFile);
  c_rep->add_option("--format", rep.format, "csv or svg")->capture_default_str();
  c_rep->add_option("--out", rep.out, "Curve output path")->required();
  c_rep->add_option("--summary", rep.summary, "Also write the summary CSV here");
  c_rep->add_option("--manifest", rep.manifest, "Run manifest whose hash tags the output")
      ->check(CLI::ExistingFile);
  c_rep->add_option("--title", rep.title, "Plot title")->capture_default_str();
  c_rep->add_option("--bin-width", rep.bin_width, "Accuracy bin width")->capture_default_str();
  c_rep->add_flag("--weighted", rep.weighted, "Weight the fit by bin counts");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_ingest->parsed()) return cmd_ingest(ingest, out);
    if (c_char->parsed()) return cmd_characterize(ch, out);
    if (c_score->parsed()) return cmd_score(score, out);
    if (c_sft->parsed()) return cmd_sftgen(sft, out);
    if (c_rep->parsed()) return cmd_report(rep, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConstraintViolation& e) {
    err << "invalid value: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace escalate
