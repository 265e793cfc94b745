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

#include "escalate/external_agent.hpp"

#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "escalate/error.hpp"

namespace escalate {
namespace {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConstraintViolation(fmt::format("endpoint '{}' has no scheme", url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

void ExternalAgentSpec::validate() const {
  if (endpoint_url.empty()) throw ConstraintViolation("endpoint_url is empty");
  split_url(endpoint_url);
  if (timeout.count() <= 0) throw ConstraintViolation("timeout must be positive");
  if (max_retries < 0) throw ConstraintViolation("max_retries must be nonnegative");
}

std::string encode_request(const ExternalAgentSpec& spec, const Transcript& transcript) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& turn : transcript.turns) {
    messages.push_back({{"role", std::string(to_string(turn.role))}, {"content", turn.text}});
  }
  nlohmann::json body = {{"model", spec.model_identifier},
                         {"thinking", spec.thinking || transcript.flags.thinking},
                         {"messages", std::move(messages)}};
  return body.dump();
}

std::optional<std::string> decode_response(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  if (auto it = j.find("text"); it != j.end() && it->is_string()) return it->get<std::string>();
  if (auto it = j.find("choices"); it != j.end() && it->is_array() && !it->empty()) {
    const auto& first = (*it)[0];
    if (first.contains("message") && first["message"].contains("content") &&
        first["message"]["content"].is_string()) {
      return first["message"]["content"].get<std::string>();
    }
  }
  return std::nullopt;
}

QueryResult query_external_agent(const ExternalAgentSpec& spec, const Transcript& transcript) {
  QueryResult result;
  SplitUrl url;
  try {
    spec.validate();
    url = split_url(spec.endpoint_url);
  } catch (const ConstraintViolation& e) {
    result.failure = e.what();
    return result;
  }

  httplib::Client client(url.base);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(spec.timeout);
  const auto micros =
      std::chrono::duration_cast<std::chrono::microseconds>(spec.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  if (const char* key = std::getenv("ESCALATE_API_KEY"); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", fmt::format("Bearer {}", key));
  }
  const std::string body = encode_request(spec, transcript);

  auto backoff = spec.initial_backoff;
  for (int attempt = 0; attempt <= spec.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    ++result.attempts;
    auto response = client.Post(url.path, headers, body, "application/json");
    if (!response) {
      result.failure = fmt::format("transport error: {}", httplib::to_string(response.error()));
      continue;
    }
    const int status = response->status;
    if (status == 429 || status >= 500) {
      result.failure = fmt::format("HTTP {}", status);
      continue;
    }
    if (status < 200 || status >= 300) {
      result.failure = fmt::format("HTTP {}", status);
      return result;
    }
    if (auto text = decode_response(response->body)) {
      result.text = std::move(*text);
      result.failure.clear();
      return result;
    }
    result.failure = "response body has no assistant text";
    return result;
  }
  return result;
}

}  // namespace escalate
