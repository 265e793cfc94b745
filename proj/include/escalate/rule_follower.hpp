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

// A local agent that answers the two-turn protocol by applying the
// expected-cost rule to what it reads in the prompt: the signal's percentage
// and the cost ratio from the framing sentence. With no signal in the prompt
// it falls back to a fixed (hallucinated) accuracy, if configured.

#include <optional>
#include <string>
#include <string_view>

#include "escalate/protocol.hpp"

namespace escalate {

struct RuleFollowerSpec {
  std::optional<double> hallucinated_accuracy = 0.80;

  bool operator==(const RuleFollowerSpec&) const = default;
};

// Integer percentage from a rendered signal sentence ("..., 91% of ...").
std::optional<int> read_signal_percent(std::string_view prompt);

// Cost ratio from any framing variant present in the text.
std::optional<double> read_cost_ratio(std::string_view prompt);

// Next assistant turn for the transcript. Turn 1 predicts the signal's
// majority label; turn 2 is the chain-of-thought target for the read
// accuracy and ratio. If either is unreadable the reply carries no
// DECISION marker.
std::string rule_follower_reply(const RuleFollowerSpec& spec, const Transcript& transcript);

}  // namespace escalate
