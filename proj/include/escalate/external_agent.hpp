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

// HTTP adapter for agents that speak the two-turn protocol.
//
// Request (POST, JSON):
//   {"model": "<id>", "thinking": false,
//    "messages": [{"role": "user", "content": "..."}, ...]}
// Response (JSON), either
//   {"text": "..."}
// or the chat-completions shape
//   {"choices": [{"message": {"content": "..."}}]}
//
// ESCALATE_API_KEY, when set, is sent as "Authorization: Bearer <key>".

#include <chrono>
#include <optional>
#include <string>

#include "escalate/protocol.hpp"

namespace escalate {

struct ExternalAgentSpec {
  std::string endpoint_url;
  std::string model_identifier;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  bool thinking = false;
  // First backoff delay; doubles after each failed attempt.
  std::chrono::milliseconds initial_backoff{500};

  // Throws ConstraintViolation.
  void validate() const;

  bool operator==(const ExternalAgentSpec&) const = default;
};

struct QueryResult {
  std::optional<std::string> text;
  // Set when text is empty: the last transport or HTTP error.
  std::string failure;
  int attempts = 0;

  bool ok() const { return text.has_value(); }
};

std::string encode_request(const ExternalAgentSpec& spec, const Transcript& transcript);

// Assistant text from a response body, or nullopt if the body has neither
// supported shape.
std::optional<std::string> decode_response(const std::string& body);

// Sends the transcript and returns the next assistant turn. Transport
// errors, timeouts, HTTP 429 and 5xx are retried up to max_retries times
// with exponential backoff; other HTTP errors fail immediately. Never
// throws for network conditions.
QueryResult query_external_agent(const ExternalAgentSpec& spec, const Transcript& transcript);

}  // namespace escalate
