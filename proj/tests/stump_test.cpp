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

#include "escalate/stump.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "escalate/error.hpp"
#include "escalate/synthetic.hpp"

namespace escalate {
namespace {

const Stump* find_leaf(const std::vector<Stump>& stumps, double threshold, bool at_least) {
  for (const auto& s : stumps) {
    const auto* n = std::get_if<NumericSplit>(&s.predicate);
    if (n && n->threshold == threshold && n->at_least == at_least) return &s;
  }
  return nullptr;
}

TEST(TrainStump, RecoversPlantedRateOnHeldOutRows) {
  const auto rows = planted_rate_scenarios(20000, 700, 0.91, 0.30, 11);
  StumpOptions opts;
  opts.seed = 5;
  const auto result = train_stump(rows, "fico", ThresholdCandidates{{700}}, opts);
  const Stump* above = find_leaf(result.stumps, 700, true);
  const Stump* below = find_leaf(result.stumps, 700, false);
  ASSERT_NE(above, nullptr);
  ASSERT_NE(below, nullptr);
  EXPECT_EQ(above->majority_label, 1);
  EXPECT_EQ(below->majority_label, 0);

  const double se_above = std::sqrt(0.91 * 0.09 / static_cast<double>(above->support));
  const double se_below = std::sqrt(0.30 * 0.70 / static_cast<double>(below->support));
  EXPECT_NEAR(above->leaf_accuracy, 0.91, 4 * se_above);
  EXPECT_NEAR(below->leaf_accuracy, 0.70, 4 * se_below);
}

TEST(TrainStump, SupportCountsOnlyHeldOutRows) {
  const auto rows = planted_rate_scenarios(1001, 700, 0.8, 0.2, 3);
  StumpOptions opts;
  opts.min_support = 1;
  const auto result = train_stump(rows, "fico", ThresholdCandidates{{700}}, opts);
  ASSERT_EQ(result.stumps.size(), 2u);
  // 1001 rows, 70% train: llround(700.7) = 701 train, 300 held out.
  EXPECT_EQ(result.stumps[0].support + result.stumps[1].support, 300u);
}

TEST(TrainStump, HeldOutAccuracyMatchesDirectCount) {
  const auto rows = planted_rate_scenarios(4000, 650, 0.75, 0.4, 8);
  StumpOptions opts;
  opts.min_support = 1;
  opts.train_fraction = 0.5;
  const auto result = train_stump(rows, "fico", ThresholdCandidates{{650}}, opts);
  for (const auto& s : result.stumps) {
    // The held-out accuracy times support must be an integer hit count.
    const double hits = s.leaf_accuracy * static_cast<double>(s.support);
    EXPECT_NEAR(hits, std::round(hits), 1e-6);
    EXPECT_GE(s.leaf_accuracy, 0.5);
  }
}

TEST(TrainStump, MinSupportDropsSmallLeavesWithDiagnostic) {
  const auto rows = planted_rate_scenarios(400, 700, 0.9, 0.1, 2);
  StumpOptions opts;
  opts.min_support = 200;
  const auto result = train_stump(rows, "fico", ThresholdCandidates{{700}}, opts);
  EXPECT_TRUE(result.stumps.empty());
  ASSERT_FALSE(result.diagnostics.empty());
  bool mentions = false;
  for (const auto& d : result.diagnostics) mentions |= d.find("min_support") != std::string::npos;
  EXPECT_TRUE(mentions);
}

TEST(TrainStump, ConstantFeatureHasNoSplit) {
  std::vector<Scenario> rows;
  for (int i = 0; i < 50; ++i) {
    rows.push_back(make_scenario(std::to_string(i), DatasetKind::LendingClub,
                                 FeatureMap{{"amount", 1000.0},
                                            {"purpose", std::string("car")},
                                            {"emp_length", std::string("1 year")},
                                            {"dti", 10.0},
                                            {"fico", 700.0}},
                                 i % 2));
  }
  const auto result = train_stump(rows, "fico", QuantileCandidates{}, StumpOptions{});
  EXPECT_TRUE(result.stumps.empty());
  EXPECT_FALSE(result.diagnostics.empty());
}

TEST(TrainStump, RejectsBadFractionAndUnknownFeature) {
  const auto rows = planted_rate_scenarios(10, 700, 0.9, 0.1, 2);
  StumpOptions bad;
  bad.train_fraction = 1.0;
  EXPECT_THROW(train_stump(rows, "fico", QuantileCandidates{}, bad), ConfigError);
  EXPECT_THROW(train_stump(rows, "shoe_size", QuantileCandidates{}, StumpOptions{}),
               ConfigError);
}

TEST(TrainStump, DeterministicForSeed) {
  const auto rows = planted_rate_scenarios(3000, 700, 0.8, 0.3, 4);
  StumpOptions opts;
  opts.seed = 17;
  const auto a = train_stump(rows, "fico", QuantileCandidates{}, opts);
  const auto b = train_stump(rows, "fico", QuantileCandidates{}, opts);
  EXPECT_EQ(a.stumps, b.stumps);
}

TEST(RenderSignal, LendingClubSentence) {
  Stump s{"fico", NumericSplit{700, true}, 1, 0.912, 1500};
  EXPECT_EQ(render_signal(s, DatasetKind::LendingClub),
            "A decision tree trained on this dataset finds that when the applicant's FICO "
            "score is at least 700, 91% of applications were approved.");
  const Signal sig = make_signal(s, DatasetKind::LendingClub);
  EXPECT_EQ(sig.percent(), 91);
  EXPECT_DOUBLE_EQ(sig.displayed_accuracy(), 0.91);
  EXPECT_DOUBLE_EQ(sig.accuracy, 0.912);
}

TEST(RenderSignal, DisplayedPercentRoundsToNearest) {
  EXPECT_EQ(displayed_percent(0.746), 75);
  EXPECT_EQ(displayed_percent(0.5), 50);
  EXPECT_EQ(displayed_percent(1.0), 100);
  EXPECT_EQ(displayed_percent(0.994), 99);
}

TEST(AssignSignal, MostSpecificStumpWins) {
  std::vector<Stump> stumps = {
      Stump{"fico", NumericSplit{650, true}, 1, 0.8, 900},
      Stump{"fico", NumericSplit{700, true}, 1, 0.9, 400},
  };
  order_by_specificity(stumps);
  EXPECT_EQ(std::get<NumericSplit>(stumps.front().predicate).threshold, 700);

  const Scenario sc = make_scenario("x", DatasetKind::LendingClub,
                                    FeatureMap{{"amount", 1000.0},
                                               {"purpose", std::string("car")},
                                               {"emp_length", std::string("1 year")},
                                               {"dti", 10.0},
                                               {"fico", 720.0}},
                                    1);
  const auto got = assign_signal(sc, stumps);
  EXPECT_EQ(got.stump_index, 0u);
  EXPECT_EQ(got.match_count, 2u);
  EXPECT_EQ(got.signal.percent(), 90);
}

TEST(AssignSignal, NoMatchThrows) {
  std::vector<Stump> stumps = {Stump{"fico", NumericSplit{800, true}, 1, 0.9, 400}};
  const Scenario sc = make_scenario("x", DatasetKind::LendingClub,
                                    FeatureMap{{"amount", 1000.0},
                                               {"purpose", std::string("car")},
                                               {"emp_length", std::string("1 year")},
                                               {"dti", 10.0},
                                               {"fico", 720.0}},
                                    1);
  EXPECT_THROW(assign_signal(sc, stumps), AssignmentError);
}

TEST(AccuracyBins, TenBinsOfFivePoints) {
  const AccuracyBins bins(0.05);
  EXPECT_EQ(bins.count(), 10u);
  EXPECT_EQ(bins.index_of(0.5), 0u);
  EXPECT_EQ(bins.index_of(0.9), 8u);
  EXPECT_EQ(bins.index_of(1.0), 9u);
  EXPECT_DOUBLE_EQ(bins.center(0), 0.525);
  EXPECT_THROW(bins.index_of(0.49), ConstraintViolation);
  EXPECT_THROW(AccuracyBins(0.07), ConfigError);
}

TEST(AccuracyBins, BucketsPartitionSignals) {
  std::vector<Signal> sigs;
  for (int pct : {50, 54, 55, 99, 100}) {
    sigs.push_back(make_signal(Stump{"fico", NumericSplit{700, true}, 1, pct / 100.0, 300},
                               DatasetKind::LendingClub));
  }
  const auto buckets = bin_by_accuracy(sigs, 0.05);
  ASSERT_EQ(buckets.size(), 10u);
  EXPECT_EQ(buckets[0].signals.size(), 2u);
  EXPECT_EQ(buckets[1].signals.size(), 1u);
  EXPECT_EQ(buckets[9].signals.size(), 2u);
}

}  // namespace
}  // namespace escalate
