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

#include "escalate/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "escalate/error.hpp"
#include "escalate/rng.hpp"

namespace escalate {
namespace {

constexpr std::array<std::string_view, 12> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

constexpr std::array<std::string_view, 6> kPurposes = {
    "debt_consolidation", "credit_card", "home_improvement", "car", "small_business",
    "medical"};

constexpr std::array<std::string_view, 11> kEmpLengths = {
    "< 1 year", "1 year",  "2 years", "3 years", "4 years", "5 years",
    "6 years",  "7 years", "8 years", "9 years", "10+ years"};

constexpr std::array<std::string_view, 16> kNeutralWords = {
    "the", "article", "source", "edit", "page", "citation", "thanks", "section",
    "I", "think", "this", "needs", "more", "review", "please", "discussion"};

constexpr std::array<std::string_view, 6> kRudeWords = {"stupid", "idiot", "pathetic",
                                                        "moron", "garbage", "clown"};

constexpr std::array<std::string_view, 8> kGenres = {
    "Comedy", "Drama", "Action", "Thriller", "Romance", "Sci-Fi", "Animation", "Horror"};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

template <typename T, std::size_t N>
std::string pick(const std::array<T, N>& items, Rng& rng) {
  return std::string(items[rng.below(N)]);
}

double uniform_int(Rng& rng, int lo, int hi) {
  return static_cast<double>(lo + static_cast<int>(rng.below(hi - lo + 1)));
}

std::string make_comment(Rng& rng, bool rude) {
  const std::size_t words = 4 + rng.below(18);
  std::string text;
  for (std::size_t i = 0; i < words; ++i) {
    if (i > 0) text += ' ';
    text += rude && rng.bernoulli(0.3) ? pick(kRudeWords, rng) : pick(kNeutralWords, rng);
  }
  const std::size_t bangs = rude ? rng.below(4) : (rng.bernoulli(0.1) ? 1 : 0);
  text.append(bangs, '!');
  if (bangs == 0) text += '.';
  return text;
}

struct Movie {
  std::string title;
  std::string genres;
  double quality = 3.5;
};

std::vector<Movie> movie_catalog(Rng& rng, std::size_t count) {
  std::vector<Movie> movies;
  for (std::size_t i = 0; i < count; ++i) {
    Movie m;
    m.title = fmt::format("Film {} ({})", i + 1, 1970 + rng.below(50));
    m.genres = pick(kGenres, rng);
    if (rng.bernoulli(0.4)) m.genres += "|" + pick(kGenres, rng);
    m.quality = std::clamp(rng.normal(3.5, 0.6), 1.0, 4.8);
    movies.push_back(std::move(m));
  }
  return movies;
}

double movie_rating(Rng& rng, double quality) {
  const double r = std::round(2.0 * (quality + rng.normal(0.0, 0.7))) / 2.0;
  return std::clamp(r, 0.5, 5.0);
}

int planted_label(DatasetKind kind, const FeatureMap& f, Rng& rng) {
  double z = 0.0;
  switch (kind) {
    case DatasetKind::HotelBookings:
      z = 0.3 - 0.9 * numeric_feature(f, "total_of_special_requests") -
          2.0 * numeric_feature(f, "required_car_parking_spaces") +
          1.5 * numeric_feature(f, "previous_cancellations") +
          0.15 * (numeric_feature(f, "stays_in_week_nights") - 2.0);
      break;
    case DatasetKind::LendingClub:
      z = 0.04 * (numeric_feature(f, "fico") - 690.0) -
          0.08 * (numeric_feature(f, "dti") - 18.0);
      break;
    case DatasetKind::WikipediaToxicity:
      // Labels for comments are set when the text is generated.
      return 0;
    case DatasetKind::MovieLens:
      z = 2.0 * numeric_feature(f, "avg_gap");
      break;
  }
  return rng.bernoulli(sigmoid(z)) ? 1 : 0;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

FeatureMap random_features(DatasetKind kind, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMap f;
  switch (kind) {
    case DatasetKind::HotelBookings: {
      const std::size_t month = rng.below(12);
      const double day = uniform_int(rng, 1, 28);
      f["arrival_date_year"] = uniform_int(rng, 2015, 2017);
      f["arrival_date_month"] = std::string(kMonths[month]);
      f["arrival_date_day_of_month"] = day;
      f["arrival_date_week_number"] =
          std::min(53.0, std::floor((month * 30.4 + day - 1.0) / 7.0) + 1.0);
      f["stays_in_weekend_nights"] = uniform_int(rng, 0, 2);
      f["stays_in_week_nights"] = uniform_int(rng, 0, 5);
      f["adults"] = uniform_int(rng, 1, 3);
      f["is_repeated_guest"] = rng.bernoulli(0.05) ? 1.0 : 0.0;
      f["previous_cancellations"] = rng.bernoulli(0.85) ? 0.0 : uniform_int(rng, 1, 2);
      f["required_car_parking_spaces"] = rng.bernoulli(0.85) ? 0.0 : 1.0;
      f["total_of_special_requests"] = uniform_int(rng, 0, 3);
      break;
    }
    case DatasetKind::LendingClub:
      f["amount"] = 25.0 * uniform_int(rng, 40, 1400);
      f["purpose"] = pick(kPurposes, rng);
      f["emp_length"] = pick(kEmpLengths, rng);
      f["dti"] = std::round(rng.uniform() * 400.0) / 10.0;
      f["fico"] = uniform_int(rng, 600, 850);
      break;
    case DatasetKind::WikipediaToxicity:
      f["comment_text"] = make_comment(rng, rng.bernoulli(0.2));
      add_derived_features(kind, f);
      break;
    case DatasetKind::MovieLens: {
      Rng catalog_rng(derive_seed(seed, 1));
      const auto movies = movie_catalog(catalog_rng, 7);
      for (int i = 0; i < 5; ++i) {
        f[fmt::format("history_{}_title", i + 1)] = movies[i].title;
        f[fmt::format("history_{}_rating", i + 1)] = movie_rating(rng, movies[i].quality);
      }
      auto put = [&](const std::string& p, const Movie& m) {
        f[p + "_title"] = m.title;
        f[p + "_genres"] = m.genres;
        f[p + "_avg"] = std::round(100.0 * m.quality) / 100.0;
        f[p + "_count"] = uniform_int(rng, 20, 2000);
      };
      put("a", movies[5]);
      put("b", movies[6]);
      f["avg_gap"] = numeric_feature(f, "a_avg") - numeric_feature(f, "b_avg");
      break;
    }
  }
  return f;
}

void write_synthetic_dataset(DatasetKind kind, const std::filesystem::path& out,
                             std::size_t rows, std::uint64_t seed) {
  Rng rng(seed);
  switch (kind) {
    case DatasetKind::HotelBookings: {
      auto o = open_out(out);
      o << "hotel,is_canceled,arrival_date_year,arrival_date_month,arrival_date_week_number,"
           "arrival_date_day_of_month,stays_in_weekend_nights,stays_in_week_nights,adults,"
           "is_repeated_guest,previous_cancellations,required_car_parking_spaces,"
           "total_of_special_requests\n";
      for (std::size_t i = 0; i < rows; ++i) {
        const FeatureMap f = random_features(kind, rng.next_u64());
        auto n = [&](const char* k) { return format_number(numeric_feature(f, k),
                                                           NumberStyle::Integer); };
        o << "City Hotel," << planted_label(kind, f, rng) << ',' << n("arrival_date_year") << ','
          << text_feature(f, "arrival_date_month") << ',' << n("arrival_date_week_number")
          << ',' << n("arrival_date_day_of_month") << ',' << n("stays_in_weekend_nights")
          << ',' << n("stays_in_week_nights") << ',' << n("adults") << ','
          << n("is_repeated_guest") << ',' << n("previous_cancellations") << ','
          << n("required_car_parking_spaces") << ',' << n("total_of_special_requests")
          << '\n';
      }
      break;
    }
    case DatasetKind::LendingClub: {
      auto o = open_out(out);
      o << "amount,purpose,emp_length,dti,fico,approved\n";
      for (std::size_t i = 0; i < rows; ++i) {
        const FeatureMap f = random_features(kind, rng.next_u64());
        o << fmt::format("{:.0f},{},{},{:.1f},{:.0f},{}\n", numeric_feature(f, "amount"),
                         text_feature(f, "purpose"), quote(text_feature(f, "emp_length")),
                         numeric_feature(f, "dti"), numeric_feature(f, "fico"),
                         planted_label(kind, f, rng));
      }
      break;
    }
    case DatasetKind::WikipediaToxicity: {
      auto o = open_out(out);
      o << "id,comment_text,toxic\n";
      for (std::size_t i = 0; i < rows; ++i) {
        const bool rude = rng.bernoulli(0.2);
        // Rude text is toxic most of the time; labels stay noisy.
        const int toxic = rng.bernoulli(rude ? 0.85 : 0.04) ? 1 : 0;
        o << fmt::format("c{:06d},{},{}\n", i, quote(make_comment(rng, rude)), toxic);
      }
      break;
    }
    case DatasetKind::MovieLens: {
      std::filesystem::create_directories(out);
      const auto movies = movie_catalog(rng, 200);
      {
        auto o = open_out(out / "movies.csv");
        o << "movieId,title,genres\n";
        for (std::size_t m = 0; m < movies.size(); ++m) {
          o << fmt::format("{},{},{}\n", m + 1, quote(movies[m].title), movies[m].genres);
        }
      }
      auto o = open_out(out / "ratings.csv");
      o << "userId,movieId,rating,timestamp\n";
      for (std::size_t u = 0; u < rows; ++u) {
        const std::size_t count = 7 + rng.below(20);
        std::vector<std::size_t> seen;
        while (seen.size() < count) {
          const std::size_t m = rng.below(movies.size());
          if (std::find(seen.begin(), seen.end(), m) == seen.end()) seen.push_back(m);
        }
        for (std::size_t m : seen) {
          o << fmt::format("{},{},{:.1f},{}\n", u + 1, m + 1,
                           movie_rating(rng, movies[m].quality), 964982703 + u);
        }
      }
      break;
    }
  }
}

std::vector<SignaledScenario> pool_with_accuracies(std::span<const double> accuracies,
                                                   DatasetKind kind, std::uint64_t seed) {
  const auto& t = traits(kind);
  std::vector<SignaledScenario> pool;
  pool.reserve(accuracies.size());
  for (std::size_t i = 0; i < accuracies.size(); ++i) {
    const double p = accuracies[i];
    if (!(p >= 0.5 && p <= 1.0)) {
      throw ConstraintViolation(fmt::format("signal accuracy {} outside [0.5, 1]", p));
    }
    Rng rng(derive_seed(seed, i));
    FeatureMap f = random_features(kind, rng.next_u64());
    // Numeric split on the first numeric signal feature, drawn so the
    // scenario satisfies it.
    const FeatureDescriptor* d = nullptr;
    for (const auto& fd : t.signal_features) {
      if (auto it = f.find(fd.name); it != f.end() && std::holds_alternative<double>(it->second)) {
        d = &fd;
        break;
      }
    }
    Stump stump;
    stump.feature_name = std::string(d->name);
    const double scale = std::pow(10.0, threshold_decimals(d->style));
    stump.predicate = NumericSplit{std::floor(numeric_feature(f, d->name) * scale) / scale, true};
    stump.majority_label = rng.bernoulli(0.5) ? 1 : 0;
    stump.leaf_accuracy = p;
    stump.support = 500;
    const int label = rng.bernoulli(p) ? stump.majority_label : 1 - stump.majority_label;
    Scenario s = make_scenario(fmt::format("synthetic-{}-{:06d}", to_string(kind), i), kind,
                               std::move(f), label);
    Signal signal = make_signal(stump, kind);
    pool.push_back({std::move(s), std::move(signal)});
  }
  return pool;
}

std::vector<SignaledScenario> synthetic_pool(const PoolSpec& spec) {
  if (spec.kinds.empty()) throw ConfigError("synthetic pool needs at least one dataset kind");
  if (!(spec.low >= 0.5 && spec.high <= 1.0 && spec.low < spec.high)) {
    throw ConfigError("synthetic pool range must lie within [0.5, 1]");
  }
  const int lo = static_cast<int>(std::lround(100.0 * spec.low));
  const int hi = static_cast<int>(std::lround(100.0 * spec.high));
  const int step = static_cast<int>(std::lround(100.0 * spec.bin_width));
  if (step <= 0 || (hi - lo) % step != 0) {
    throw ConfigError("bin width must divide the synthetic pool range in whole percents");
  }
  Rng rng(derive_seed(spec.seed, 0x706f6f6cULL));
  std::vector<SignaledScenario> pool;
  std::size_t serial = 0;
  for (int bin = lo; bin < hi; bin += step) {
    for (std::size_t k = 0; k < spec.per_bin; ++k, ++serial) {
      const double p = (bin + static_cast<int>(rng.below(step))) / 100.0;
      const DatasetKind kind = spec.kinds[serial % spec.kinds.size()];
      const double one[] = {p};
      auto item = pool_with_accuracies(one, kind, derive_seed(spec.seed, serial));
      item.front().scenario.id = fmt::format("synthetic-{}-{:06d}", to_string(kind), serial);
      pool.push_back(std::move(item.front()));
    }
  }
  return pool;
}

std::vector<Scenario> planted_rate_scenarios(std::size_t rows, double threshold,
                                             double rate_above, double rate_below,
                                             std::uint64_t seed) {
  const int cut = static_cast<int>(std::lround(threshold));
  if (cut <= 600 || cut > 850) {
    throw ConstraintViolation("planted FICO threshold must lie in (600, 850]");
  }
  Rng rng(seed);
  std::vector<Scenario> out;
  out.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    FeatureMap f = random_features(DatasetKind::LendingClub, rng.next_u64());
    const bool above = rng.bernoulli(0.5);
    const double fico = above ? cut + static_cast<double>(rng.below(851 - cut))
                              : cut - 1.0 - static_cast<double>(rng.below(cut - 600));
    f["fico"] = fico;
    const int label = rng.bernoulli(above ? rate_above : rate_below) ? 1 : 0;
    out.push_back(make_scenario(fmt::format("planted-{:07d}", i), DatasetKind::LendingClub,
                                std::move(f), label));
  }
  return out;
}

}  // namespace escalate
