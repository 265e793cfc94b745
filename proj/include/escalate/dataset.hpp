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

// Decision datasets: scenario type, per-dataset text templates, and CSV
// ingestion with each dataset's sampling rule.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace escalate {

enum class DatasetKind { HotelBookings, LendingClub, WikipediaToxicity, MovieLens };

inline constexpr std::array<DatasetKind, 4> kAllDatasetKinds = {
    DatasetKind::HotelBookings, DatasetKind::LendingClub,
    DatasetKind::WikipediaToxicity, DatasetKind::MovieLens};

std::string_view to_string(DatasetKind kind);

// Accepts the canonical name or its lowercase form ("lendingclub").
// Throws ConfigError.
DatasetKind parse_dataset_kind(std::string_view name);

using FeatureValue = std::variant<double, std::string>;
using FeatureMap = std::map<std::string, FeatureValue, std::less<>>;

struct Scenario {
  std::string id;
  DatasetKind kind = DatasetKind::LendingClub;
  FeatureMap features;
  std::string rendered_text;
  int label = 0;

  bool operator==(const Scenario&) const = default;
};

// The only constructor path for Scenario: renders the text from features and
// validates the label.
Scenario make_scenario(std::string id, DatasetKind kind, FeatureMap features, int label);

// Fills the dataset's template. Currency gets thousands separators, percents
// one decimal. Throws RenderError naming a missing or mistyped field.
std::string render_scenario(const FeatureMap& features, DatasetKind kind);

enum class NumberStyle { Integer, Decimal1, Percent1, Currency, Rating2 };

std::string format_number(double value, NumberStyle style);

// Text attached to a dataset's binary decision.
struct FeatureDescriptor {
  std::string_view name;
  // Noun phrase used in signal conditions ("the applicant's FICO score").
  std::string_view phrase;
  NumberStyle style;
};

struct DatasetTraits {
  DatasetKind kind;
  // Opening sentence of the scenario block; also states what 1 and 0 mean.
  std::string_view context;
  // Completes "N% ..." in a signal, indexed by majority label.
  std::array<std::string_view, 2> outcome;
  std::vector<FeatureDescriptor> signal_features;

  const FeatureDescriptor* feature(std::string_view name) const;
};

const DatasetTraits& traits(DatasetKind kind);


// Typed feature lookup. Throws RenderError when absent or of the wrong type.
double numeric_feature(const FeatureMap& features, std::string_view name);
const std::string& text_feature(const FeatureMap& features, std::string_view name);

// Adds features computed from raw columns: comment_length and
// exclamation_count for WikipediaToxicity. No-op for other kinds.
void add_derived_features(DatasetKind kind, FeatureMap& features);

enum class ColumnType { Number, Text, Label };

struct ColumnSpec {
  std::string name;
  ColumnType type = ColumnType::Text;
};

// Column manifest for one dataset kind (data/manifests/<kind>.json).
struct DatasetManifest {
  DatasetKind kind = DatasetKind::LendingClub;
  // Logical file role -> file name. Single-file datasets use "main".
  std::map<std::string, std::string> files;
  std::map<std::string, std::vector<ColumnSpec>> columns;
  std::string label_column;
  std::vector<std::string> signal_features;
};

DatasetManifest load_manifest(const std::filesystem::path& path);

// Manifest shipped with the repository.
DatasetManifest default_manifest(DatasetKind kind);

std::filesystem::path default_manifest_dir();

struct SampleSpec {
  // LendingClub: rows drawn per label.
  std::size_t per_class = 10000;
  // HotelBookings, WikipediaToxicity: uniform sample size; 0 keeps all rows.
  std::size_t sample_size = 0;
  // MovieLens: whole users are drawn until this many ratings are covered.
  std::size_t max_ratings = 1000000;
  // MovieLens: cap on pairwise items; 0 keeps one per eligible user.
  std::size_t max_pairs = 0;
};

struct IngestResult {
  std::vector<Scenario> scenarios;
  std::size_t rows_read = 0;
  std::size_t rejected_rows = 0;
  std::size_t skipped_ties = 0;
  std::vector<std::string> diagnostics;
};

// Reads a dataset and applies its sampling rule. For MovieLens, path is a
// directory holding the ratings and movies files named by the manifest.
// Deterministic given (path contents, kind, spec, seed).
// Throws IoError, SchemaError (missing column, empty file) or ConfigError
// (not enough rows for the requested sample).
IngestResult ingest_dataset(const std::filesystem::path& path, DatasetKind kind,
                            const SampleSpec& spec, std::uint64_t seed,
                            const DatasetManifest& manifest);

IngestResult ingest_dataset(const std::filesystem::path& path, DatasetKind kind,
                            const SampleSpec& spec, std::uint64_t seed);

}  // namespace escalate
