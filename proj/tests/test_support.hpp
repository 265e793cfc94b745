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

// Shared fixtures and independent oracles for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "escalate/decision.hpp"

namespace escalate::testing {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("escalate-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Uniform, two truncated normals and two histograms.
inline std::vector<AccuracyDistribution> test_densities() {
  return {
      AccuracyDistribution::uniform(),
      AccuracyDistribution::truncated_normal(0.7, 0.15),
      AccuracyDistribution::truncated_normal(0.9, 0.05),
      AccuracyDistribution::histogram({0.0, 0.5, 0.8, 1.0}, {0.2, 0.5, 0.3}),
      AccuracyDistribution::histogram({0.0, 0.25, 0.5, 0.75, 0.9, 1.0},
                                      {0.05, 0.1, 0.25, 0.4, 0.2}),
  };
}

// Composite midpoint rule for C(tau) using only the density, with a cell
// boundary placed at tau.
inline double midpoint_cost(const AccuracyDistribution& dist, double tau, const CostModel& cost,
                            int cells = 20000) {
  auto integrate = [&](double a, double b, auto&& g) {
    if (b <= a) return 0.0;
    const int n = std::max(1, static_cast<int>(cells * (b - a)));
    const double h = (b - a) / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = a + (i + 0.5) * h;
      s += g(x);
    }
    return s * h;
  };
  // Split at tau and at any histogram edges so no cell straddles a jump.
  std::vector<double> cuts{0.0, tau, 1.0};
  if (const auto* h = std::get_if<HistogramDensity>(&dist.representation())) {
    cuts.insert(cuts.end(), h->edges.begin(), h->edges.end());
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b <= tau) {
      total += integrate(a, b, [&](double p) { return cost.labor_cost() * dist.density(p); });
    } else {
      total += integrate(a, b, [&](double p) {
        return (1.0 - p) * cost.error_cost() * dist.density(p);
      });
    }
  }
  return total;
}

}  // namespace escalate::testing
