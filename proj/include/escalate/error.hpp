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

#include <stdexcept>
#include <string>

namespace escalate {

// A value violates a documented domain constraint (e.g. an invalid CostModel).
class ConstraintViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data does not match the expected schema. Carries the offending
// column or line when known.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The two-turn protocol was driven out of order.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid run configuration, detected before any work starts.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A scenario template could not be filled; the message names the field.
class RenderError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace escalate
