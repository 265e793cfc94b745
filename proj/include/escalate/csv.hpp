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

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace escalate {

// Streaming RFC 4180 reader: quoted fields may contain commas, doubled
// quotes and line breaks. Handles LF and CRLF line endings.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next record into fields. Returns false at end of input.
  // Throws SchemaError on an unterminated quoted field.
  bool next_row(std::vector<std::string>& fields);

  // 1-based physical line on which the last returned record started.
  std::size_t record_line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

// Header-indexed view used by the ingesters.
class CsvHeader {
 public:
  explicit CsvHeader(std::vector<std::string> names);

  std::optional<std::size_t> find(std::string_view name) const;

  // Throws SchemaError naming the column when absent.
  std::size_t require(std::string_view name) const;

  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

// Parses "12,000", "$12,000", "14.3%" and plain decimals. Returns nullopt for
// empty or malformed input.
std::optional<double> parse_number(std::string_view text);

}  // namespace escalate
