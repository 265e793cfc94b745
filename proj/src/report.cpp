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

#include "escalate/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "escalate/error.hpp"

namespace escalate {
namespace {

// Fixed precision keeps the output byte-stable across platforms.
std::string num(double v) { return fmt::format("{:.6f}", v); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "svg") return ReportFormat::Svg;
  throw ConfigError(fmt::format("unknown report format '{}' (csv or svg)", name));
}

std::string render_curve_csv(const CurveReport& report) {
  std::string out =
      "accuracy_bin_center,mean_accuracy,escalation_rate,standard_error,n,manifest_hash\n";
  for (const auto& p : report.curve.points) {
    out += fmt::format("{},{},{},{},{},{}\n", num(p.accuracy_bin_center), num(p.mean_accuracy),
                       num(p.escalation_rate), num(p.standard_error), p.n,
                       csv_escape(report.manifest_hash));
  }
  return out;
}

std::string render_summary_csv(std::span<const CharacterizationReport> reports,
                               const std::string& manifest_hash) {
  std::string out =
      "agent_id,scope,implicit_threshold,implicit_threshold_display,fit_intercept,fit_slope,"
      "fit_weighting,no_signal_rate,self_estimated_accuracy,self_estimate_clamped,"
      "actual_accuracy,calibration_gap,overconfident,manifest_hash\n";
  for (const auto& r : reports) {
    const auto& t = r.implicit_threshold;
    const std::string p_star = t.value ? num(*t.value) : "ill-posed";
    const std::string a_hat = r.self_estimate.value ? num(*r.self_estimate.value) : "undefined";
    const auto gap = r.calibration_gap();
    const auto over = r.overconfident();
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_escape(r.agent_id),
                       csv_escape(r.scope), p_star, csv_escape(t.display()),
                       num(t.fit.intercept), num(t.fit.slope), to_string(t.fit.weighting),
                       num(r.no_signal_rate), a_hat, r.self_estimate.clamped ? "true" : "false",
                       num(r.actual_accuracy), gap ? num(*gap) : "undefined",
                       over ? (*over ? "true" : "false") : "undefined",
                       csv_escape(manifest_hash));
  }
  return out;
}

std::string render_curve_svg(const CurveReport& report) {
  constexpr double kW = 640, kH = 420, kL = 70, kR = 20, kT = 40, kB = 60;
  constexpr double x0 = 0.5, x1 = 1.0;
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  auto sx = [&](double x) { return kL + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kT + (1.0 - y) * ph; };
  auto f = [](double v) { return fmt::format("{:.2f}", v); };

  std::string s;
  s += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kW, kH);
  s += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kW, kH);
  s += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                   f(kW / 2), xml_escape(report.title));
  // Axes and ticks.
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n",
                   f(kL), f(kT + ph), f(kL + pw));
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
                   f(kL), f(kT), f(kT + ph));
  for (int i = 0; i <= 5; ++i) {
    const double x = x0 + i * 0.1;
    s += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>"
        "<text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\">{4}%</text>\n",
        f(sx(x)), f(kT + ph), f(kT + ph + 5), f(kT + ph + 20), 50 + 10 * i);
    const double y = i * 0.2;
    s += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#dddddd\"/>"
        "<text x=\"{3}\" y=\"{4}\" text-anchor=\"end\">{5}%</text>\n",
        f(kL), f(sy(y)), f(kL + pw), f(kL - 6), f(sy(y) + 4), 20 * i);
  }
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">Signal accuracy</text>\n",
                   f(kL + pw / 2), f(kH - 15));
  s += fmt::format(
      "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">"
      "Escalation rate</text>\n",
      f(kT + ph / 2));
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#999999\" "
                   "stroke-dasharray=\"4 4\"/>\n",
                   f(kL), f(sy(0.5)), f(kL + pw));

  if (report.threshold) {
    const auto& fit = report.threshold->fit;
    auto clamp_y = [](double y) { return std::clamp(y, 0.0, 1.0); };
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#d62728\" "
                     "stroke-width=\"2\"/>\n",
                     f(sx(x0)), f(sy(clamp_y(fit.at(x0)))), f(sx(x1)),
                     f(sy(clamp_y(fit.at(x1)))));
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\" fill=\"#d62728\">p* = {}"
                     "</text>\n",
                     f(kL + pw - 4), f(kT + 14), xml_escape(report.threshold->display()));
  }

  for (const auto& p : report.curve.points) {
    const double lo = std::max(0.0, p.escalation_rate - p.standard_error);
    const double hi = std::min(1.0, p.escalation_rate + p.standard_error);
    const double x = sx(p.mean_accuracy);
    s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#1f77b4\"/>\n",
                     f(x), f(sy(lo)), f(sy(hi)));
    s += fmt::format("<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#1f77b4\"/>"
                     "<line x1=\"{0}\" y1=\"{3}\" x2=\"{1}\" y2=\"{3}\" stroke=\"#1f77b4\"/>\n",
                     f(x - 4), f(x + 4), f(sy(lo)), f(sy(hi)));
    s += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"#1f77b4\"/>\n", f(x),
                     f(sy(p.escalation_rate)));
  }
  s += fmt::format("<!-- manifest_hash={} -->\n", xml_escape(report.manifest_hash));
  s += "</svg>\n";
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

void emit_report(const CurveReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  write_text(path, format == ReportFormat::Csv ? render_curve_csv(report)
                                               : render_curve_svg(report));
}

void emit_summary(std::span<const CharacterizationReport> reports,
                  const std::string& manifest_hash, const std::filesystem::path& path) {
  write_text(path, render_summary_csv(reports, manifest_hash));
}

}  // namespace escalate
