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

// Writes synthetic raw datasets in the layouts `escalate ingest` reads, for
// trying the pipeline without downloading the public datasets.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "escalate/dataset.hpp"
#include "escalate/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic raw dataset", "escalate_synth"};
  std::string dataset;
  std::string out;
  std::size_t rows = 5000;
  std::uint64_t seed = 0;
  app.add_option("--dataset", dataset, "Dataset kind")->required();
  app.add_option("--out", out, "Output CSV, or directory for MovieLens")->required();
  app.add_option("--rows", rows, "Rows (users for MovieLens)")->capture_default_str();
  app.add_option("--seed", seed, "Seed")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    escalate::write_synthetic_dataset(escalate::parse_dataset_kind(dataset), out, rows, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
