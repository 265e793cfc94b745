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

#include "escalate/protocol.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "escalate/error.hpp"
#include "test_support.hpp"

namespace escalate {
namespace {

std::string golden(const std::string& name) {
  return testing::slurp(std::filesystem::path(ESCALATE_GOLDEN_DIR) / name);
}

Scenario loan() {
  return make_scenario("loan-1", DatasetKind::LendingClub,
                       FeatureMap{{"amount", 35000.0},
                                  {"purpose", std::string("debt_consolidation")},
                                  {"emp_length", std::string("10+ years")},
                                  {"dti", 6.8},
                                  {"fico", 705.0}},
                       1);
}

Signal fico_signal() {
  return make_signal(Stump{"fico", NumericSplit{700, true}, 1, 0.91, 2000},
                     DatasetKind::LendingClub);
}

TEST(PredictionPrompt, MatchesGoldenWithSignal) {
  const Signal sig = fico_signal();
  const Transcript t = build_prediction_prompt(loan(), &sig);
  ASSERT_EQ(t.turns.size(), 1u);
  EXPECT_EQ(t.turns[0].role, Role::User);
  EXPECT_EQ(t.turns[0].text, golden("fig2_turn1_user.txt"));
  EXPECT_TRUE(t.flags.signal_present);
}

TEST(PredictionPrompt, MatchesGoldenWithoutSignal) {
  const Transcript t = build_prediction_prompt(loan(), nullptr);
  EXPECT_EQ(t.turns[0].text, golden("fig2_turn1_user_nosignal.txt"));
  EXPECT_FALSE(t.flags.signal_present);
}

TEST(PredictionPrompt, EmptyRenderedTextIsRejected) {
  Scenario s = loan();
  s.rendered_text.clear();
  EXPECT_THROW(build_prediction_prompt(s, nullptr), ConstraintViolation);
}

TEST(EscalationPrompt, MatchesGoldenWithCostRatio) {
  const Signal sig = fico_signal();
  Transcript t = with_reply(build_prediction_prompt(loan(), &sig),
                            golden("fig2_turn1_assistant.txt"));
  t = build_escalation_prompt(std::move(t), 4.0);
  ASSERT_EQ(t.turns.size(), 3u);
  EXPECT_EQ(t.turns[2].text, golden("fig2_turn2_user_r4.txt"));
  EXPECT_EQ(t.flags.cost_ratio_framing, std::optional<double>(4.0));
}

TEST(EscalationPrompt, MatchesGoldenWithoutCostRatio) {
  Transcript t = with_reply(build_prediction_prompt(loan(), nullptr), "PREDICTION: 1");
  t = build_escalation_prompt(std::move(t), std::nullopt);
  EXPECT_EQ(t.turns[2].text, golden("fig2_turn2_user_plain.txt"));
  t = with_reply(std::move(t), "DECISION: 0");
  EXPECT_TRUE(t.complete());
}

TEST(EscalationPrompt, RequiresCompletedFirstTurn) {
  const Transcript t = build_prediction_prompt(loan(), nullptr);
  EXPECT_THROW(build_escalation_prompt(t, 4.0), ProtocolError);
  Transcript done = build_escalation_prompt(with_reply(t, "PREDICTION: 0"), 4.0);
  EXPECT_THROW(build_escalation_prompt(done, 4.0), ProtocolError);
}

TEST(WithReply, MustFollowUserTurn) {
  Transcript t = with_reply(build_prediction_prompt(loan(), nullptr), "PREDICTION: 0");
  EXPECT_THROW(with_reply(t, "again"), ProtocolError);
  EXPECT_THROW(with_reply(Transcript{}, "hello"), ProtocolError);
}

TEST(Framing, AllVariantsStateTheRatio) {
  EXPECT_EQ(framing_sentence(FramingVariant::Original, 4),
            "Implementing a wrong answer costs 4× more than escalating.");
  EXPECT_EQ(framing_sentence(FramingVariant::Dollar, 2.5),
            "Implementing a wrong answer costs $2.5, while escalating costs $1.");
  for (auto v : kAllFramings) {
    EXPECT_NE(framing_sentence(v, 20).find("20"), std::string::npos) << to_string(v);
    EXPECT_EQ(parse_framing(to_string(v)), v);
  }
  EXPECT_THROW(parse_framing("sideways"), ConfigError);
}

TEST(FormatRatio, DropsTrailingZeros) {
  EXPECT_EQ(format_ratio(4.0), "4");
  EXPECT_EQ(format_ratio(2.5), "2.5");
  EXPECT_EQ(format_ratio(50), "50");
}

TEST(ParsePrediction, LastMarkerWins) {
  EXPECT_EQ(parse_prediction("PREDICTION: 1"), (Parsed<int>(1)));
  EXPECT_EQ(parse_prediction("first PREDICTION: 0 then prediction:1"), (Parsed<int>(1)));
  EXPECT_EQ(parse_prediction("Prediction:\n 0"), (Parsed<int>(0)));
}

TEST(ParsePrediction, MissingOrMalformedIsFailure) {
  EXPECT_TRUE(std::holds_alternative<ParseFailure>(parse_prediction("I think 1")));
  EXPECT_TRUE(std::holds_alternative<ParseFailure>(parse_prediction("PREDICTION: 2")));
  EXPECT_TRUE(std::holds_alternative<ParseFailure>(parse_prediction("PREDICTION: 10")));
  EXPECT_TRUE(std::holds_alternative<ParseFailure>(parse_prediction("")));
}

TEST(ParseDecision, MapsDigitsToDecisions) {
  EXPECT_EQ(parse_decision("... DECISION: 0"), (Parsed<Decision>(Decision::Implement)));
  EXPECT_EQ(parse_decision("decision: 1"), (Parsed<Decision>(Decision::Escalate)));
  EXPECT_TRUE(std::holds_alternative<ParseFailure>(parse_decision("escalate")));
}

}  // namespace
}  // namespace escalate
