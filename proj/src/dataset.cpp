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

#include "escalate/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "escalate/csv.hpp"
#include "escalate/error.hpp"
#include "escalate/rng.hpp"

namespace escalate {
namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Drops a trailing ".0" so ratings read "4/5" rather than "4.0/5".
std::string format_rating(double r) {
  if (r == std::floor(r)) return fmt::format("{:.0f}", r);
  return fmt::format("{:g}", r);
}

std::string with_thousands(long long v) {
  std::string digits = std::to_string(v < 0 ? -v : v);
  std::string out;
  const std::size_t n = digits.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && (n - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return v < 0 ? "-" + out : out;
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

std::string render_hotel(const FeatureMap& f) {
  const double repeated = numeric_feature(f, "is_repeated_guest");
  return fmt::format(
      "Person 1 has booked a hotel stay arriving on {} {}, {} (week {}), with {} "
      "weekend night(s) and {} weekday night(s). The party consists of {} adult(s). "
      "Person 1 is {} repeated guest and has {} previous cancellation(s). They have "
      "requested {} car parking space(s) and made {} special request(s).",
      text_feature(f, "arrival_date_month"),
      format_number(numeric_feature(f, "arrival_date_day_of_month"), NumberStyle::Integer),
      format_number(numeric_feature(f, "arrival_date_year"), NumberStyle::Integer),
      format_number(numeric_feature(f, "arrival_date_week_number"), NumberStyle::Integer),
      format_number(numeric_feature(f, "stays_in_weekend_nights"), NumberStyle::Integer),
      format_number(numeric_feature(f, "stays_in_week_nights"), NumberStyle::Integer),
      format_number(numeric_feature(f, "adults"), NumberStyle::Integer),
      repeated != 0.0 ? "a" : "not a",
      format_number(numeric_feature(f, "previous_cancellations"), NumberStyle::Integer),
      format_number(numeric_feature(f, "required_car_parking_spaces"), NumberStyle::Integer),
      format_number(numeric_feature(f, "total_of_special_requests"), NumberStyle::Integer));
}

std::string render_lending(const FeatureMap& f) {
  std::string purpose = text_feature(f, "purpose");
  std::replace(purpose.begin(), purpose.end(), '_', ' ');
  return fmt::format(
      "The applicant is requesting {} for {}. They have been employed for {}, a "
      "debt-to-income ratio of {}, and a credit score of {}.",
      format_number(numeric_feature(f, "amount"), NumberStyle::Currency), purpose,
      text_feature(f, "emp_length"),
      format_number(numeric_feature(f, "dti"), NumberStyle::Percent1),
      format_number(numeric_feature(f, "fico"), NumberStyle::Integer));
}

std::string render_wikipedia(const FeatureMap& f) {
  return fmt::format("This comment needs to be checked: '{}'",
                     trim(text_feature(f, "comment_text")));
}

std::string render_movielens(const FeatureMap& f) {
  std::string history;
  for (int i = 1; i <= 5; ++i) {
    if (i > 1) history += ", ";
    history += fmt::format("{} ({}/5)", text_feature(f, fmt::format("history_{}_title", i)),
                           format_rating(numeric_feature(f, fmt::format("history_{}_rating", i))));
  }
  auto movie = [&](char slot) {
    const std::string p(1, static_cast<char>(std::tolower(slot)));
    return fmt::format(
        "Movie {}: {} ({}), average rating {}/5 ({} ratings).", slot,
        text_feature(f, p + "_title"), text_feature(f, p + "_genres"),
        format_number(numeric_feature(f, p + "_avg"), NumberStyle::Rating2),
        format_number(numeric_feature(f, p + "_count"), NumberStyle::Integer));
  };
  return fmt::format("Person 1 has reviewed: {}. Consider these two movies: {} {}", history,
                     movie('A'), movie('B'));
}

const std::vector<DatasetTraits>& traits_table() {
  static const std::vector<DatasetTraits> table = {
      {DatasetKind::HotelBookings,
       "You are helping a hotel anticipate Person 1's decision on their booking "
       "(1 = cancel, 0 = keep).",
       {"of bookings were kept", "of bookings were canceled"},
       {{"total_of_special_requests", "the number of special requests", NumberStyle::Integer},
        {"previous_cancellations", "the guest's number of previous cancellations",
         NumberStyle::Integer},
        {"required_car_parking_spaces", "the number of requested car parking spaces",
         NumberStyle::Integer},
        {"arrival_date_week_number", "the arrival week number", NumberStyle::Integer},
        {"stays_in_week_nights", "the number of weekday nights", NumberStyle::Integer}}},
      {DatasetKind::LendingClub,
       "You are helping Person 1, a loan officer, decide whether to approve a loan "
       "(1 = approve, 0 = reject).",
       {"of applications were rejected", "of applications were approved"},
       {{"fico", "the applicant's FICO score", NumberStyle::Integer},
        {"dti", "the applicant's debt-to-income ratio", NumberStyle::Percent1},
        {"amount", "the requested loan amount", NumberStyle::Currency},
        {"emp_length", "the applicant's employment length", NumberStyle::Integer}}},
      {DatasetKind::WikipediaToxicity,
       "You are helping Person 1, a content moderator, decide whether a Wikipedia "
       "discussion comment is toxic (1 = toxic, 0 = not toxic).",
       {"of comments were labeled not toxic", "of comments were labeled toxic"},
       {{"comment_length", "the comment's length in characters", NumberStyle::Integer},
        {"exclamation_count", "the number of exclamation marks in the comment",
         NumberStyle::Integer}}},
      {DatasetKind::MovieLens,
       "You are helping Person 1 choose between two movies by predicting which one "
       "Person 1 rated more highly (1 = Movie A, 0 = Movie B).",
       {"of users rated Movie B higher", "of users rated Movie A higher"},
       {{"avg_gap", "Movie A's community average rating minus Movie B's",
         NumberStyle::Rating2}}},
  };
  return table;
}

// ---------------------------------------------------------------------------
// Ingestion helpers.

struct OpenedCsv {
  std::ifstream stream;
  std::unique_ptr<CsvReader> reader;
  std::unique_ptr<CsvHeader> header;
};

void open_csv(const std::filesystem::path& path, OpenedCsv& out) {
  out.stream.open(path, std::ios::binary);
  if (!out.stream) throw IoError(fmt::format("cannot open '{}'", path.string()));
  out.reader = std::make_unique<CsvReader>(out.stream);
  std::vector<std::string> names;
  if (!out.reader->next_row(names) || (names.size() == 1 && trim(names[0]).empty())) {
    throw SchemaError(fmt::format("'{}' is empty: no header row", path.string()));
  }
  for (auto& n : names) n = trim(n);
  out.header = std::make_unique<CsvHeader>(std::move(names));
}

std::optional<int> parse_label(std::string_view text) {
  auto v = parse_number(trim(text));
  if (!v) {
    const std::string t = lowercase(trim(text));
    if (t == "true") return 1;
    if (t == "false") return 0;
    return std::nullopt;
  }
  if (*v == 0.0) return 0;
  if (*v == 1.0) return 1;
  return std::nullopt;
}

struct Row {
  std::size_t source_index;
  FeatureMap features;
  int label;
};

// Reads every row of a single-file dataset, validating the manifest columns.
std::vector<Row> read_single_file(const std::filesystem::path& path,
                                  const DatasetManifest& manifest, IngestResult& result) {
  OpenedCsv csv;
  open_csv(path, csv);
  const auto cols_it = manifest.columns.find("main");
  if (cols_it == manifest.columns.end()) {
    throw SchemaError("manifest has no column list for file role 'main'");
  }
  std::vector<std::pair<ColumnSpec, std::size_t>> cols;
  for (const auto& spec : cols_it->second) {
    cols.emplace_back(spec, csv.header->require(spec.name));
  }

  std::vector<Row> rows;
  std::vector<std::string> fields;
  std::size_t index = 0;
  while (csv.reader->next_row(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    ++result.rows_read;
    const std::size_t source_index = index++;
    Row row{source_index, {}, 0};
    bool ok = true;
    for (const auto& [spec, idx] : cols) {
      if (idx >= fields.size()) {
        ok = false;
        break;
      }
      const std::string& raw = fields[idx];
      if (spec.type == ColumnType::Label) {
        auto label = parse_label(raw);
        if (!label) {
          ok = false;
          break;
        }
        row.label = *label;
      } else if (spec.type == ColumnType::Number) {
        auto v = parse_number(raw);
        if (!v) {
          ok = false;
          break;
        }
        row.features.emplace(spec.name, *v);
      } else {
        row.features.emplace(spec.name, raw);
      }
    }
    if (!ok) {
      ++result.rejected_rows;
      continue;
    }
    rows.push_back(std::move(row));
  }
  if (result.rejected_rows > 0) {
    result.diagnostics.push_back(
        fmt::format("rejected {} row(s) with unparsable label or feature values",
                    result.rejected_rows));
  }
  return rows;
}


std::vector<std::size_t> take_sample(std::size_t population, std::size_t want, Rng& rng) {
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (want == 0 || want >= population) return idx;
  shuffle_in_place(idx, rng);
  idx.resize(want);
  return idx;
}

std::string scenario_id(DatasetKind kind, std::size_t index) {
  return fmt::format("{}-{:07d}", lowercase(to_string(kind)), index);
}

IngestResult ingest_tabular(const std::filesystem::path& path, DatasetKind kind,
                            const SampleSpec& spec, std::uint64_t seed,
                            const DatasetManifest& manifest) {
  IngestResult result;
  std::vector<Row> rows = read_single_file(path, manifest, result);
  Rng rng(seed);

  std::vector<std::size_t> chosen;
  if (kind == DatasetKind::LendingClub) {
    std::array<std::vector<std::size_t>, 2> by_label;
    for (std::size_t i = 0; i < rows.size(); ++i) by_label[rows[i].label].push_back(i);
    for (int label : {0, 1}) {
      if (by_label[label].size() < spec.per_class) {
        throw ConfigError(fmt::format(
            "balanced sample needs {} rows with label {}, '{}' has {}", spec.per_class,
            label, path.string(), by_label[label].size()));
      }
      shuffle_in_place(by_label[label], rng);
      by_label[label].resize(spec.per_class);
      chosen.insert(chosen.end(), by_label[label].begin(), by_label[label].end());
    }
    shuffle_in_place(chosen, rng);
  } else {
    chosen = take_sample(rows.size(), spec.sample_size, rng);
  }

  result.scenarios.reserve(chosen.size());
  for (std::size_t i : chosen) {
    Row& row = rows[i];
    add_derived_features(kind, row.features);
    result.scenarios.push_back(make_scenario(scenario_id(kind, row.source_index), kind,
                                             std::move(row.features), row.label));
  }
  return result;
}

IngestResult ingest_movielens(const std::filesystem::path& dir, const SampleSpec& spec,
                              std::uint64_t seed, const DatasetManifest& manifest) {
  IngestResult result;
  auto file_for = [&](const std::string& role) {
    auto it = manifest.files.find(role);
    if (it == manifest.files.end()) {
      throw SchemaError(fmt::format("manifest names no '{}' file", role));
    }
    return dir / it->second;
  };

  struct Movie {
    std::string title;
    std::string genres;
  };
  std::unordered_map<long long, Movie> movies;
  {
    OpenedCsv csv;
    open_csv(file_for("movies"), csv);
    const std::size_t id_col = csv.header->require("movieId");
    const std::size_t title_col = csv.header->require("title");
    const std::size_t genres_col = csv.header->require("genres");
    std::vector<std::string> fields;
    while (csv.reader->next_row(fields)) {
      if (fields.size() <= std::max({id_col, title_col, genres_col})) continue;
      auto id = parse_number(fields[id_col]);
      if (!id) continue;
      movies[static_cast<long long>(*id)] = {fields[title_col], fields[genres_col]};
    }
  }

  struct Rating {
    long long movie;
    double value;
  };
  std::map<long long, std::vector<Rating>> by_user;
  {
    OpenedCsv csv;
    open_csv(file_for("ratings"), csv);
    const std::size_t user_col = csv.header->require("userId");
    const std::size_t movie_col = csv.header->require("movieId");
    const std::size_t rating_col = csv.header->require("rating");
    std::vector<std::string> fields;
    while (csv.reader->next_row(fields)) {
      if (fields.size() == 1 && fields[0].empty()) continue;
      ++result.rows_read;
      if (fields.size() <= std::max({user_col, movie_col, rating_col})) {
        ++result.rejected_rows;
        continue;
      }
      auto user = parse_number(fields[user_col]);
      auto movie = parse_number(fields[movie_col]);
      auto rating = parse_number(fields[rating_col]);
      if (!user || !movie || !rating) {
        ++result.rejected_rows;
        continue;
      }
      by_user[static_cast<long long>(*user)].push_back(
          {static_cast<long long>(*movie), *rating});
    }
  }
  if (result.rejected_rows > 0) {
    result.diagnostics.push_back(
        fmt::format("rejected {} unparsable rating row(s)", result.rejected_rows));
  }

  // Draw whole users until the rating budget is covered.
  std::vector<long long> users;
  users.reserve(by_user.size());
  for (const auto& [user, _] : by_user) users.push_back(user);
  Rng rng(seed);
  shuffle_in_place(users, rng);
  std::vector<long long> sampled;
  std::size_t covered = 0;
  for (long long u : users) {
    if (spec.max_ratings != 0 && covered >= spec.max_ratings) break;
    sampled.push_back(u);
    covered += by_user[u].size();
  }

  std::unordered_map<long long, std::pair<double, std::size_t>> community;
  for (long long u : sampled) {
    for (const auto& r : by_user[u]) {
      auto& [sum, count] = community[r.movie];
      sum += r.value;
      ++count;
    }
  }
  result.diagnostics.push_back(
      fmt::format("sampled {} ratings from {} users", covered, sampled.size()));

  std::size_t missing_movies = 0;
  for (long long u : sampled) {
    if (spec.max_pairs != 0 && result.scenarios.size() >= spec.max_pairs) break;
    std::vector<Rating> ratings = by_user[u];
    if (ratings.size() < 7) continue;
    Rng user_rng(derive_seed(seed, static_cast<std::uint64_t>(u)));
    shuffle_in_place(ratings, user_rng);
    std::optional<std::size_t> second;
    for (std::size_t j = 6; j < ratings.size(); ++j) {
      if (ratings[j].value != ratings[5].value) {
        second = j;
        break;
      }
    }
    if (!second) {
      ++result.skipped_ties;
      continue;
    }
    bool known = true;
    for (std::size_t j : {0, 1, 2, 3, 4, 5}) known = known && movies.count(ratings[j].movie);
    known = known && movies.count(ratings[*second].movie);
    if (!known) {
      ++missing_movies;
      continue;
    }

    FeatureMap f;
    for (int i = 0; i < 5; ++i) {
      f[fmt::format("history_{}_title", i + 1)] = movies[ratings[i].movie].title;
      f[fmt::format("history_{}_rating", i + 1)] = ratings[i].value;
    }
    Rating first = ratings[5];
    Rating other = ratings[*second];
    if (user_rng.bernoulli(0.5)) std::swap(first, other);
    auto put = [&](const std::string& p, const Rating& r) {
      const auto& [sum, count] = community[r.movie];
      f[p + "_title"] = movies[r.movie].title;
      f[p + "_genres"] = movies[r.movie].genres;
      f[p + "_avg"] = sum / static_cast<double>(count);
      f[p + "_count"] = static_cast<double>(count);
    };
    put("a", first);
    put("b", other);
    f["avg_gap"] = numeric_feature(f, "a_avg") - numeric_feature(f, "b_avg");
    const int label = first.value > other.value ? 1 : 0;
    result.scenarios.push_back(make_scenario(
        fmt::format("movielens-u{}", u), DatasetKind::MovieLens, std::move(f), label));
  }
  if (result.skipped_ties > 0) {
    result.diagnostics.push_back(
        fmt::format("skipped {} user(s) whose candidate ratings were all tied",
                    result.skipped_ties));
  }
  if (missing_movies > 0) {
    result.diagnostics.push_back(
        fmt::format("skipped {} user(s) referencing movies absent from the movies file",
                    missing_movies));
  }
  return result;
}

}  // namespace

void add_derived_features(DatasetKind kind, FeatureMap& f) {
  if (kind == DatasetKind::WikipediaToxicity) {
    const std::string comment = trim(text_feature(f, "comment_text"));
    f["comment_length"] = static_cast<double>(comment.size());
    f["exclamation_count"] =
        static_cast<double>(std::count(comment.begin(), comment.end(), '!'));
  }
}

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::HotelBookings:
      return "HotelBookings";
    case DatasetKind::LendingClub:
      return "LendingClub";
    case DatasetKind::WikipediaToxicity:
      return "WikipediaToxicity";
    case DatasetKind::MovieLens:
      return "MovieLens";
  }
  return "unknown";
}

DatasetKind parse_dataset_kind(std::string_view name) {
  const std::string wanted = lowercase(name);
  for (DatasetKind k : kAllDatasetKinds) {
    if (lowercase(to_string(k)) == wanted) return k;
  }
  throw ConfigError(fmt::format("unknown dataset kind '{}'", name));
}

std::string format_number(double value, NumberStyle style) {
  switch (style) {
    case NumberStyle::Integer:
      return fmt::format("{:.0f}", value);
    case NumberStyle::Decimal1:
      return fmt::format("{:.1f}", value);
    case NumberStyle::Percent1:
      return fmt::format("{:.1f}%", value);
    case NumberStyle::Rating2:
      return fmt::format("{:.2f}", value);
    case NumberStyle::Currency: {
      const double cents = std::round(value * 100.0);
      const auto whole = static_cast<long long>(std::trunc(cents / 100.0));
      const auto frac = static_cast<long long>(std::llabs(static_cast<long long>(cents)) % 100);
      if (frac == 0) return "$" + with_thousands(whole);
      return fmt::format("${}.{:02d}", with_thousands(whole), frac);
    }
  }
  return {};
}

const FeatureDescriptor* DatasetTraits::feature(std::string_view name) const {
  for (const auto& d : signal_features) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const DatasetTraits& traits(DatasetKind kind) {
  for (const auto& t : traits_table()) {
    if (t.kind == kind) return t;
  }
  throw ConfigError("no traits for dataset kind");
}

double numeric_feature(const FeatureMap& features, std::string_view name) {
  auto it = features.find(name);
  if (it == features.end()) throw RenderError(fmt::format("missing field '{}'", name));
  if (const double* v = std::get_if<double>(&it->second)) return *v;
  throw RenderError(fmt::format("field '{}' is not numeric", name));
}

const std::string& text_feature(const FeatureMap& features, std::string_view name) {
  auto it = features.find(name);
  if (it == features.end()) throw RenderError(fmt::format("missing field '{}'", name));
  if (const std::string* v = std::get_if<std::string>(&it->second)) return *v;
  throw RenderError(fmt::format("field '{}' is not text", name));
}

std::string render_scenario(const FeatureMap& features, DatasetKind kind) {
  switch (kind) {
    case DatasetKind::HotelBookings:
      return render_hotel(features);
    case DatasetKind::LendingClub:
      return render_lending(features);
    case DatasetKind::WikipediaToxicity:
      return render_wikipedia(features);
    case DatasetKind::MovieLens:
      return render_movielens(features);
  }
  throw RenderError("unknown dataset kind");
}

Scenario make_scenario(std::string id, DatasetKind kind, FeatureMap features, int label) {
  if (label != 0 && label != 1) {
    throw ConstraintViolation(fmt::format("scenario label must be 0 or 1, got {}", label));
  }
  Scenario s;
  s.id = std::move(id);
  s.kind = kind;
  s.rendered_text = render_scenario(features, kind);
  s.features = std::move(features);
  s.label = label;
  return s;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open manifest '{}'", path.string()));
  nlohmann::json j;
  try {
    in >> j;
    DatasetManifest m;
    m.kind = parse_dataset_kind(j.at("kind").get<std::string>());
    m.files = j.at("files").get<std::map<std::string, std::string>>();
    for (const auto& [role, cols] : j.at("columns").items()) {
      auto& out = m.columns[role];
      for (const auto& c : cols) {
        ColumnSpec spec;
        spec.name = c.at("name").get<std::string>();
        const std::string type = c.at("type").get<std::string>();
        if (type == "number") {
          spec.type = ColumnType::Number;
        } else if (type == "text") {
          spec.type = ColumnType::Text;
        } else if (type == "label") {
          spec.type = ColumnType::Label;
        } else {
          throw SchemaError(fmt::format("manifest column '{}' has unknown type '{}'",
                                        spec.name, type));
        }
        out.push_back(std::move(spec));
      }
    }
    m.label_column = j.value("label_column", "");
    m.signal_features = j.at("signal_features").get<std::vector<std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("malformed manifest '{}': {}", path.string(), e.what()));
  }
}

std::filesystem::path default_manifest_dir() {
  return std::filesystem::path(ESCALATE_DATA_DIR) / "manifests";
}

DatasetManifest default_manifest(DatasetKind kind) {
  return load_manifest(default_manifest_dir() / (lowercase(to_string(kind)) + ".json"));
}

IngestResult ingest_dataset(const std::filesystem::path& path, DatasetKind kind,
                            const SampleSpec& spec, std::uint64_t seed,
                            const DatasetManifest& manifest) {
  if (manifest.kind != kind) {
    throw ConfigError(fmt::format("manifest is for {}, not {}", to_string(manifest.kind),
                                  to_string(kind)));
  }
  if (kind == DatasetKind::MovieLens) {
    if (!std::filesystem::is_directory(path)) {
      throw IoError(fmt::format("MovieLens input '{}' must be a directory", path.string()));
    }
    return ingest_movielens(path, spec, seed, manifest);
  }
  return ingest_tabular(path, kind, spec, seed, manifest);
}

IngestResult ingest_dataset(const std::filesystem::path& path, DatasetKind kind,
                            const SampleSpec& spec, std::uint64_t seed) {
  return ingest_dataset(path, kind, spec, seed, default_manifest(kind));
}

}  // namespace escalate
