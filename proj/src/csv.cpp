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

#include "escalate/csv.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

#include "escalate/error.hpp"

namespace escalate {

bool CsvReader::next_row(std::vector<std::string>& fields) {
  fields.clear();
  int c = in_.get();
  if (c == EOF) return false;
  record_line_ = line_;

  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  for (;; c = in_.get()) {
    if (c == EOF) {
      if (in_quotes) {
        throw SchemaError(
            fmt::format("unterminated quoted field starting on line {}", record_line_));
      }
      fields.push_back(std::move(field));
      return true;
    }
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && field.empty() && !field_was_quoted) {
      in_quotes = true;
      field_was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (ch == '\r' && in_.peek() == '\n') {
      // CRLF; the '\n' ends the record on the next iteration.
    } else if (ch == '\n') {
      ++line_;
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(ch);
    }
  }
}

CsvHeader::CsvHeader(std::vector<std::string> names) : names_(std::move(names)) {
  // Tolerate a UTF-8 BOM on the first column.
  if (!names_.empty() && names_[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    names_[0].erase(0, 3);
  }
}

std::optional<std::size_t> CsvHeader::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t CsvHeader::require(std::string_view name) const {
  if (auto idx = find(name)) return *idx;
  throw SchemaError(fmt::format("missing required column '{}'", name));
}

std::optional<double> parse_number(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char ch : text) {
    if (ch == ',' || ch == '$' || ch == '%' || ch == ' ') continue;
    cleaned.push_back(ch);
  }
  if (cleaned.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = cleaned.data();
  const char* last = first + cleaned.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

}  // namespace escalate
