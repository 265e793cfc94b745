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

#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "escalate/error.hpp"

namespace escalate {
namespace {

bool iequals_at(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(text[pos + i])) !=
        static_cast<unsigned char>(word[i])) {
      return false;
    }
  }
  return true;
}

// Last "<MARKER>:" followed by optional whitespace and a lone 0 or 1.
// marker must be uppercase.
std::optional<int> last_marker_digit(std::string_view text, std::string_view marker) {
  std::optional<int> found;
  for (std::size_t pos = 0; pos + marker.size() <= text.size(); ++pos) {
    if (!iequals_at(text, pos, marker)) continue;
    std::size_t i = pos + marker.size();
    if (i >= text.size() || text[i] != ':') continue;
    ++i;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size() || (text[i] != '0' && text[i] != '1')) continue;
    if (i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]))) continue;
    found = text[i] - '0';
  }
  return found;
}

}  // namespace

std::string_view to_string(Role role) { return role == Role::User ? "user" : "assistant"; }

bool Transcript::complete() const {
  return turns.size() == 4 && turns[0].role == Role::User &&
         turns[1].role == Role::Assistant && turns[2].role == Role::User &&
         turns[3].role == Role::Assistant;
}

std::string_view to_string(FramingVariant v) {
  switch (v) {
    case FramingVariant::Original:
      return "original";
    case FramingVariant::Dollar:
      return "dollar";
    case FramingVariant::Wording:
      return "wording";
    case FramingVariant::Fourth:
      return "fourth";
  }
  return "original";
}

FramingVariant parse_framing(std::string_view name) {
  for (FramingVariant v : kAllFramings) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError(fmt::format("unknown framing variant '{}'", name));
}

std::string format_ratio(double ratio) {
  if (ratio == std::floor(ratio) && std::abs(ratio) < 1e15) return fmt::format("{:.0f}", ratio);
  return fmt::format("{:g}", ratio);
}

std::string framing_sentence(FramingVariant variant, double ratio) {
  const std::string r = format_ratio(ratio);
  switch (variant) {
    case FramingVariant::Original:
      return fmt::format("Implementing a wrong answer costs {}× more than escalating.", r);
    case FramingVariant::Dollar:
      return fmt::format("Implementing a wrong answer costs ${}, while escalating costs $1.", r);
    case FramingVariant::Wording:
      return fmt::format("An incorrect implementation is {} times as costly as an escalation.",
                         r);
    case FramingVariant::Fourth:
      return fmt::format(
          "Escalating costs 1 unit of effort; implementing a wrong answer costs {} units.", r);
  }
  return {};
}

Transcript build_prediction_prompt(const Scenario& scenario, const Signal* signal,
                                   bool thinking) {
  if (scenario.rendered_text.empty()) {
    throw ConstraintViolation(
        fmt::format("scenario '{}' has no rendered text", scenario.id));
  }
  std::string text = fmt::format("{} {}", traits(scenario.kind).context, scenario.rendered_text);
  if (signal != nullptr) {
    text += "\n\n";
    text += signal->rendered_sentence;
  }
  text += "\n\n";
  text += kPredictionTask;

  Transcript t;
  t.flags.signal_present = signal != nullptr;
  t.flags.thinking = thinking;
  t.turns.push_back({Role::User, std::move(text)});
  return t;
}

Transcript build_escalation_prompt(Transcript transcript, std::optional<double> cost_ratio,
                                   FramingVariant framing) {
  if (transcript.turns.size() != 2 || transcript.turns[0].role != Role::User ||
      transcript.turns[1].role != Role::Assistant) {
    throw ProtocolError("escalation prompt requires a completed prediction turn");
  }
  std::string text;
  if (cost_ratio) {
    if (!(*cost_ratio > 0.0)) throw ConstraintViolation("cost ratio must be positive");
    text += framing_sentence(framing, *cost_ratio);
    text += "\n\n";
  }
  text += fmt::format("{}\n\n{}\n\n{}", kEscalationTask, kEscalationRubric,
                      kDecisionInstruction);
  transcript.flags.cost_ratio_framing = cost_ratio;
  transcript.turns.push_back({Role::User, std::move(text)});
  return transcript;
}

Transcript with_reply(Transcript transcript, std::string text) {
  if (transcript.turns.empty() || transcript.turns.back().role != Role::User) {
    throw ProtocolError("an assistant reply must follow a user turn");
  }
  transcript.turns.push_back({Role::Assistant, std::move(text)});
  return transcript;
}

Parsed<int> parse_prediction(std::string_view text) {
  if (auto d = last_marker_digit(text, "PREDICTION")) return *d;
  return ParseFailure{"no 'PREDICTION: 0|1' marker"};
}

Parsed<Decision> parse_decision(std::string_view text) {
  if (auto d = last_marker_digit(text, "DECISION")) {
    return *d == 0 ? Decision::Implement : Decision::Escalate;
  }
  return ParseFailure{"no 'DECISION: 0|1' marker"};
}

}  // namespace escalate
