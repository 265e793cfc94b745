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

// JSON-lines archives for scenarios, stumps and signal-assigned scenarios.
// The first line is a header naming the archive kind and schema version.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "escalate/dataset.hpp"
#include "escalate/stump.hpp"

namespace escalate {

inline constexpr int kArchiveSchemaVersion = 1;

nlohmann::json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Stump& s);
Stump stump_from_json(const nlohmann::json& j);

// Writers throw IoError. Readers throw IoError, or SchemaError naming the
// line for a wrong header, version or malformed record.
void write_scenarios(std::span<const Scenario> scenarios, const std::filesystem::path& path);
std::vector<Scenario> read_scenarios(const std::filesystem::path& path);

void write_stumps(std::span<const Stump> stumps, DatasetKind kind,
                  const std::filesystem::path& path);
std::vector<Stump> read_stumps(const std::filesystem::path& path, DatasetKind kind);

// Signals are stored by stump and rebuilt with make_signal on load.
void write_signaled(std::span<const SignaledScenario> items, const std::filesystem::path& path);
std::vector<SignaledScenario> read_signaled(const std::filesystem::path& path);

}  // namespace escalate
