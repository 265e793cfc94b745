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

#include "escalate/rule_follower.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

#include "escalate/sft.hpp"

namespace escalate {
namespace {

constexpr std::string_view kSignalLead = "A decision tree trained on this dataset finds that";

// Reads a decimal number starting at pos; returns the end offset.
std::optional<std::pair<double, std::size_t>> read_number(std::string_view text,
                                                          std::size_t pos) {
  std::size_t end = pos;
  while (end < text.size() &&
         (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == '.')) {
    ++end;
  }
  // A trailing period ends the sentence, not the number.
  while (end > pos && text[end - 1] == '.') --end;
  if (end == pos) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + end, value);
  if (ec != std::errc() || ptr != text.data() + end) return std::nullopt;
  return std::pair{value, end};
}

int signal_label(std::string_view sentence) {
  for (DatasetKind kind : kAllDatasetKinds) {
    const auto& outcome = traits(kind).outcome;
    if (sentence.find(outcome[1]) != std::string_view::npos) return 1;
    if (sentence.find(outcome[0]) != std::string_view::npos) return 0;
  }
  return 1;
}

std::string_view signal_sentence(std::string_view prompt) {
  const std::size_t at = prompt.find(kSignalLead);
  if (at == std::string_view::npos) return {};
  std::size_t end = prompt.find('\n', at);
  if (end == std::string_view::npos) end = prompt.size();
  return prompt.substr(at, end - at);
}

}  // namespace

std::optional<int> read_signal_percent(std::string_view prompt) {
  const std::string_view sentence = signal_sentence(prompt);
  if (sentence.empty()) return std::nullopt;
  const std::size_t pct = sentence.rfind("% ");
  if (pct == std::string_view::npos) return std::nullopt;
  std::size_t start = pct;
  while (start > 0 && std::isdigit(static_cast<unsigned char>(sentence[start - 1]))) --start;
  if (start == pct) return std::nullopt;
  int value = 0;
  std::from_chars(sentence.data() + start, sentence.data() + pct, value);
  return value;
}

std::optional<double> read_cost_ratio(std::string_view prompt) {
  // Each framing sentence is split at the ratio into a fixed prefix and
  // suffix; a marker value keeps the split independent of the wording.
  for (FramingVariant v : kAllFramings) {
    const std::string probe = framing_sentence(v, 7);
    const std::size_t mark = probe.find('7');
    const std::string_view prefix = std::string_view(probe).substr(0, mark);
    const std::string_view suffix = std::string_view(probe).substr(mark + 1);
    for (std::size_t at = prompt.find(prefix); at != std::string_view::npos;
         at = prompt.find(prefix, at + 1)) {
      auto number = read_number(prompt, at + prefix.size());
      if (!number) continue;
      if (prompt.substr(number->second, suffix.size()) == suffix) return number->first;
    }
  }
  return std::nullopt;
}

std::string rule_follower_reply(const RuleFollowerSpec& spec, const Transcript& transcript) {
  if (transcript.turns.empty()) return "There is nothing to answer.";
  const std::string& first = transcript.turns.front().text;
  if (transcript.turns.size() == 1) {
    const std::string_view sentence = signal_sentence(first);
    const int label = sentence.empty() ? 1 : signal_label(sentence);
    return fmt::format("Following the decision tree's rule, Person 1 most likely chooses {}.\n\n"
                       "PREDICTION: {}",
                       label, label);
  }

  std::optional<double> p;
  if (auto pct = read_signal_percent(first)) {
    p = *pct / 100.0;
  } else {
    p = spec.hallucinated_accuracy;
  }
  const std::optional<double> ratio = read_cost_ratio(transcript.turns.back().text);
  if (!p) return "No accuracy estimate is available, so no cost comparison can be made.";
  if (!ratio || !(*ratio > 1.0)) {
    return "No cost ratio is stated, so no cost comparison can be made.";
  }
  return generate_target(*p, *ratio);
}

}  // namespace escalate
