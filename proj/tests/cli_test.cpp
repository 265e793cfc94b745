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

#include <gtest/gtest.h>

#include <sstream>

#include "escalate/runner.hpp"
#include "escalate/synthetic.hpp"
#include "test_support.hpp"

namespace escalate {
namespace {

using testing::slurp;
using testing::spit;
using testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "escalate");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("characterize"), std::string::npos);
}

TEST(Cli, NoSubcommandOrUnknownFlagIsUsageError) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"score", "--bogus"}).code, kExitUsage);
}

TEST(Cli, IngestMissingFileIsUsageError) {
  TempDir dir;
  const std::string missing = (dir / "nope.csv").string();
  const auto r = run({"ingest", "--dataset", "lendingclub", "--input", missing});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find(missing), std::string::npos) << r.err;
}

TEST(Cli, IngestLendingClubSamplesTenThousandPerClass) {
  TempDir dir;
  write_synthetic_dataset(DatasetKind::LendingClub, dir / "loans.csv", 40000, 6);
  const auto r = run({"ingest", "--dataset", "lendingclub", "--input",
                      (dir / "loans.csv").string(), "--out", (dir / "arch").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("LendingClub: 20000 scenarios (10000/10000)"), std::string::npos) << r.out;
  EXPECT_TRUE(std::filesystem::exists(dir / "arch" / "lendingclub.signaled.jsonl"));
}

TEST(Cli, UnknownAgentIsUsageError) {
  TempDir dir;
  const auto r = run({"characterize", "--agent", "nobody", "--out", dir.path().string(),
                      "--synthetic-per-bin", "30"});
  EXPECT_EQ(r.code, kExitUsage);
}

TEST(Cli, CharacterizeThenScoreAndReport) {
  TempDir dir;
  const std::string out = (dir / "run").string();
  const auto c = run({"characterize", "--agent", "omniscient", "--out", out,
                      "--synthetic-per-bin", "30", "--seed", "4"});
  ASSERT_EQ(c.code, kExitOk) << c.err;
  EXPECT_NE(c.out.find("[pooled] p* = "), std::string::npos) << c.out;
  for (const char* f : {"manifest.json", "curve.csv", "curve.svg", "summary.csv",
                        "records/baseline.jsonl", "records/no-signal.jsonl"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "run" / f)) << f;
  }

  const auto s = run({"score", "--records", out + "/records/baseline.jsonl", "--ratio", "4"});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  EXPECT_NE(s.out.find("tau* = 75.0% at R = 4"), std::string::npos) << s.out;
  EXPECT_NE(s.out.find("omniscient\tbaseline\t100.0%\t250\t0"), std::string::npos) << s.out;

  const auto rep = run({"report", "--records", out + "/records/baseline.jsonl",
                        out + "/records/no-signal.jsonl", "--format", "svg", "--out",
                        (dir / "c.svg").string(), "--summary", (dir / "s.csv").string(),
                        "--manifest", out + "/manifest.json"});
  ASSERT_EQ(rep.code, kExitOk) << rep.err;
  EXPECT_NE(slurp(dir / "c.svg").find("manifest_hash="), std::string::npos);
}

TEST(Cli, CharacterizeIsDeterministic) {
  TempDir dir;
  for (const char* sub : {"a", "b"}) {
    ASSERT_EQ(run({"characterize", "--agent", "logistic-75", "--out", (dir / sub).string(),
                   "--synthetic-per-bin", "30", "--seed", "9", "--jobs", "3"})
                  .code,
              kExitOk);
  }
  EXPECT_EQ(slurp(dir / "a" / "summary.csv"), slurp(dir / "b" / "summary.csv"));
  EXPECT_EQ(slurp(dir / "a" / "records" / "baseline.jsonl"),
            slurp(dir / "b" / "records" / "baseline.jsonl"));
}

TEST(Cli, ScoreRejectsRatioAtMostOne) {
  TempDir dir;
  persist_records({}, dir / "r.jsonl");
  EXPECT_EQ(run({"score", "--records", (dir / "r.jsonl").string(), "--ratio", "1"}).code,
            kExitUsage);
}

TEST(Cli, ScoreReportsSchemaErrorsAsRuntimeFailures) {
  TempDir dir;
  spit(dir / "r.jsonl", "{\"schema\":\"escalate.trial_records\",\"version\":7}\n");
  const auto r = run({"score", "--records", (dir / "r.jsonl").string()});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("schema"), std::string::npos);
}

TEST(Cli, SftgenPrintsGridAndWritesCorpus) {
  TempDir dir;
  const auto r = run({"sftgen", "--out", (dir / "c.jsonl").string(), "--per-cell", "2",
                      "--synthetic-per-bin", "8"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("3 datasets × 4 framings × 6 ratios"), std::string::npos) << r.out;
  std::size_t n = 0;
  const std::string text = slurp(dir / "c.jsonl");
  for (char ch : text) n += ch == '\n';
  EXPECT_EQ(n, 3u * 4u * 6u * 2u);
}

TEST(Cli, SftgenRejectsHoldoutOutsideDatasets) {
  TempDir dir;
  const auto r = run({"sftgen", "--out", (dir / "c.jsonl").string(), "--datasets",
                      "LendingClub", "--synthetic-per-bin", "8"});
  EXPECT_EQ(r.code, kExitUsage);
}

TEST(Cli, AgentsFileAndTomlConfig) {
  TempDir dir;
  spit(dir / "agents.json",
       R"({"agents":[{"id":"mine","type":"simulated","threshold":0.6}]})");
  spit(dir / "cfg.toml", "[characterize]\nagent = \"mine\"\nseed = 3\n");
  const auto r = run({"--config", (dir / "cfg.toml").string(), "characterize", "--agents",
                      (dir / "agents.json").string(), "--out", (dir / "o").string(),
                      "--synthetic-per-bin", "30"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("mine"), std::string::npos);
}

}  // namespace
}  // namespace escalate
