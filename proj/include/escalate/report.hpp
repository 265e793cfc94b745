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

// CSV and SVG emission for curves and characterization reports. Every
// output carries the run-manifest hash.
//
// Curve CSV columns:
//   accuracy_bin_center, mean_accuracy, escalation_rate, standard_error, n,
//   manifest_hash
// Summary CSV columns:
//   agent_id, scope, implicit_threshold, implicit_threshold_display,
//   fit_intercept, fit_slope, fit_weighting, no_signal_rate,
//   self_estimated_accuracy, self_estimate_clamped, actual_accuracy,
//   calibration_gap, overconfident, manifest_hash
// Undefined numeric cells hold "ill-posed" (p*) or "undefined" (a-hat).

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "escalate/analysis.hpp"

namespace escalate {

enum class ReportFormat { Csv, Svg };

// Throws ConfigError.
ReportFormat parse_report_format(std::string_view name);

struct CurveReport {
  std::string title;
  EscalationCurve curve;
  std::optional<ImplicitThreshold> threshold;
  std::string manifest_hash;
};

std::string render_curve_csv(const CurveReport& report);
std::string render_curve_svg(const CurveReport& report);
std::string render_summary_csv(std::span<const CharacterizationReport> reports,
                               const std::string& manifest_hash);

// Writes the curve in the requested format. Throws IoError.
void emit_report(const CurveReport& report, ReportFormat format,
                 const std::filesystem::path& path);
void emit_summary(std::span<const CharacterizationReport> reports,
                  const std::string& manifest_hash, const std::filesystem::path& path);

// Writes text to path, throwing IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace escalate
