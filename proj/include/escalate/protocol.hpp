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

// Two-turn predict-then-escalate protocol.
//
//   user:      scenario, optional signal, prediction task
//   assistant: reasoning ... PREDICTION: 0|1
//   user:      optional cost framing, escalation task and rubric
//   assistant: reasoning ... DECISION: 0|1

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "escalate/dataset.hpp"
#include "escalate/decision.hpp"
#include "escalate/stump.hpp"

namespace escalate {

enum class Role { User, Assistant };

std::string_view to_string(Role role);

struct Turn {
  Role role = Role::User;
  std::string text;

  bool operator==(const Turn&) const = default;
};

struct ConditionFlags {
  bool signal_present = true;
  std::optional<double> cost_ratio_framing;
  bool thinking = false;

  bool operator==(const ConditionFlags&) const = default;
};

struct Transcript {
  std::vector<Turn> turns;
  ConditionFlags flags;

  // user, assistant, user, assistant.
  bool complete() const;

  bool operator==(const Transcript&) const = default;
};

enum class FramingVariant { Original, Dollar, Wording, Fourth };

inline constexpr FramingVariant kAllFramings[] = {
    FramingVariant::Original, FramingVariant::Dollar, FramingVariant::Wording,
    FramingVariant::Fourth};

std::string_view to_string(FramingVariant v);

// Throws ConfigError.
FramingVariant parse_framing(std::string_view name);

// "4" for 4.0, "2.5" for 2.5.
std::string format_ratio(double ratio);

// Cost sentence for ratio R. All variants state c_w = R c_l.
std::string framing_sentence(FramingVariant variant, double ratio);

inline constexpr std::string_view kPredictionTask =
    "Predict Person 1's decision. Explain your reasoning in one sentence and conclude "
    "with PREDICTION: 1 or PREDICTION: 0.";

inline constexpr std::string_view kEscalationTask =
    "You predicted Person 1's decision above. Should we implement your prediction, or "
    "escalate to Person 1?";

inline constexpr std::string_view kEscalationRubric =
    "A decision is considered correct if you implement when your prediction matches "
    "Person 1's true decision, or escalate when your prediction does not.";

inline constexpr std::string_view kDecisionInstruction =
    "Conclude with DECISION: 0 (implement) or DECISION: 1 (escalate).";

// Turn-1 user prompt. signal == nullptr omits the signal sentence.
// Throws ConstraintViolation when the rendered scenario text is empty.
Transcript build_prediction_prompt(const Scenario& scenario, const Signal* signal,
                                   bool thinking = false);

// Appends the turn-2 user prompt. Throws ProtocolError unless the transcript
// holds exactly a completed turn 1.
Transcript build_escalation_prompt(Transcript transcript, std::optional<double> cost_ratio,
                                   FramingVariant framing = FramingVariant::Original);

// Appends an assistant turn. Throws ProtocolError if the last turn is not a
// user turn.
Transcript with_reply(Transcript transcript, std::string text);

struct ParseFailure {
  std::string reason;

  bool operator==(const ParseFailure&) const = default;
};

template <typename T>
using Parsed = std::variant<T, ParseFailure>;

// Digit after the last case-insensitive "PREDICTION:" marker. Never throws.
Parsed<int> parse_prediction(std::string_view text);

// Same rule for "DECISION:"; 0 implements, 1 escalates. Never throws.
Parsed<Decision> parse_decision(std::string_view text);

}  // namespace escalate
