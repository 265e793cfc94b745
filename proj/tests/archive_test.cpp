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

#include <gtest/gtest.h>

#include "escalate/error.hpp"
#include "escalate/synthetic.hpp"
#include "test_support.hpp"

namespace escalate {
namespace {

using testing::slurp;
using testing::spit;
using testing::TempDir;

std::vector<SignaledScenario> mixed_pool() {
  PoolSpec spec;
  spec.per_bin = 2;
  spec.seed = 13;
  return synthetic_pool(spec);
}

TEST(Archive, ScenariosRoundTrip) {
  TempDir dir;
  std::vector<Scenario> scenarios;
  for (const auto& s : mixed_pool()) scenarios.push_back(s.scenario);
  write_scenarios(scenarios, dir / "s.jsonl");
  EXPECT_EQ(read_scenarios(dir / "s.jsonl"), scenarios);
}

TEST(Archive, StumpsRoundTripAndCheckKind) {
  TempDir dir;
  std::vector<Stump> stumps = {
      Stump{"fico", NumericSplit{700, true}, 1, 0.91, 1200},
      Stump{"purpose", CategoricalSplit{{"car", "house"}}, 0, 0.64, 300},
  };
  write_stumps(stumps, DatasetKind::LendingClub, dir / "t.jsonl");
  EXPECT_EQ(read_stumps(dir / "t.jsonl", DatasetKind::LendingClub), stumps);
  EXPECT_THROW(read_stumps(dir / "t.jsonl", DatasetKind::MovieLens), SchemaError);
}

TEST(Archive, SignaledRoundTrip) {
  TempDir dir;
  const auto pool = mixed_pool();
  write_signaled(pool, dir / "p.jsonl");
  EXPECT_EQ(read_signaled(dir / "p.jsonl"), pool);
}

TEST(Archive, TamperedSentenceIsRejected) {
  TempDir dir;
  const auto pool = mixed_pool();
  write_signaled(pool, dir / "p.jsonl");
  std::string text = slurp(dir / "p.jsonl");
  const auto at = text.find("A decision tree");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 1, "The");
  spit(dir / "p.jsonl", text);
  EXPECT_THROW(read_signaled(dir / "p.jsonl"), SchemaError);
}

TEST(Archive, WrongHeaderAndMalformedLines) {
  TempDir dir;
  spit(dir / "a.jsonl", "{\"schema\":\"escalate.stumps\",\"version\":1,\"kind\":\"LendingClub\"}\n");
  EXPECT_THROW(read_scenarios(dir / "a.jsonl"), SchemaError);
  spit(dir / "b.jsonl", "{\"schema\":\"escalate.scenarios\",\"version\":9}\n");
  EXPECT_THROW(read_scenarios(dir / "b.jsonl"), SchemaError);
  write_scenarios({}, dir / "c.jsonl");
  EXPECT_TRUE(read_scenarios(dir / "c.jsonl").empty());
  spit(dir / "c.jsonl", slurp(dir / "c.jsonl") + "{not json\n");
  try {
    read_scenarios(dir / "c.jsonl");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_scenarios(dir / "missing.jsonl"), IoError);
}

}  // namespace
}  // namespace escalate
