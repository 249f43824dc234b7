// Copyright 2026 The clickstack Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "clickstack/evaluate.hpp"
#include "csv.hpp"
#include "json_util.hpp"

namespace clickstack {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// JSON has no infinities; -inf (a constant truth vector missed by the
// prediction) and the never-scored NaN mean travel as strings.
nlohmann::json real_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double real_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "nan") return kNaN;
  throw Error(ErrorCode::kParseError, "bad real value '" + s + "'");
}

std::string md_real(double v) {
  if (std::isnan(v)) return "n/a";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::size_t index_of(const std::vector<std::string>& names,
                     std::string_view name) {
  auto it = std::ranges::find(names, name);
  if (it == names.end()) {
    throw Error(ErrorCode::kMissingColumn, "'" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

std::string render_json(const EvaluationReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

std::string render_csv(const EvaluationReport& report) {
  const auto summary = report.summary();
  std::string out = "day,variant,r2\n";
  for (std::size_t d = 0; d < report.test_days.size(); ++d) {
    for (const auto& s : summary) {
      const auto& c = report.cells[d][index_of(report.variants, s.variant)];
      out += detail::format_csv_row(
          {report.test_days[d], s.variant,
           c.ok() ? detail::format_real(c.r2) : std::string("error")});
    }
  }
  return out;
}

std::string render_markdown(const EvaluationReport& report) {
  const auto summary = report.summary();
  std::string out = "# Rolling evaluation\n\n";
  if (!report.test_days.empty()) {
    out += "Test days " + report.test_days.front() + " to " +
           report.test_days.back() + " (" +
           std::to_string(report.test_days.size()) + " days), " +
           std::to_string(report.variants.size()) + " variants.\n\n";
  }
  out += "| rank | variant | mean R2 | scored days | failed days |\n";
  out += "|---:|---|---:|---:|---:|\n";
  int rank = 1;
  for (const auto& s : summary) {
    out += "| " + std::to_string(rank++) + " | " + s.variant + " | " +
           md_real(s.mean_r2) + " | " + std::to_string(s.scored_days) +
           " | " + std::to_string(s.failed_days) + " |\n";
  }
  out += "\n## Per-day R2\n\n| variant |";
  for (const auto& day : report.test_days) out += " " + day + " |";
  out += "\n|---|";
  for (std::size_t d = 0; d < report.test_days.size(); ++d) out += "---:|";
  out += "\n";
  for (const auto& s : summary) {
    const std::size_t v = index_of(report.variants, s.variant);
    out += "| " + s.variant + " |";
    for (std::size_t d = 0; d < report.test_days.size(); ++d) {
      const auto& c = report.cells[d][v];
      out += " " + (c.ok() ? md_real(c.r2) : std::string("error")) + " |";
    }
    out += "\n";
  }
  return out;
}

}  // namespace

void EvaluationReport::validate() const {
  if (cells.size() != test_days.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one cell row per test day");
  }
  for (const auto& row : cells) {
    if (row.size() != variants.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "one cell per variant");
    }
  }
}

const ReportCell& EvaluationReport::cell(std::string_view day,
                                         std::string_view variant) const {
  return cells[index_of(test_days, day)][index_of(variants, variant)];
}

std::vector<VariantSummary> EvaluationReport::summary() const {
  validate();
  std::vector<VariantSummary> out;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    VariantSummary s{variants[v], kNaN, 0, 0};
    double sum = 0.0;
    for (const auto& row : cells) {
      if (row[v].ok()) {
        sum += row[v].r2;
        ++s.scored_days;
      } else {
        ++s.failed_days;
      }
    }
    if (s.scored_days > 0) s.mean_r2 = sum / s.scored_days;
    out.push_back(std::move(s));
  }
  std::ranges::sort(out, [](const VariantSummary& a, const VariantSummary& b) {
    const bool a_nan = std::isnan(a.mean_r2);
    const bool b_nan = std::isnan(b.mean_r2);
    if (a_nan != b_nan) return b_nan;
    if (!a_nan && a.mean_r2 != b.mean_r2) return a.mean_r2 > b.mean_r2;
    return a.variant < b.variant;
  });
  return out;
}

nlohmann::json report_to_json(const EvaluationReport& report) {
  report.validate();
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t d = 0; d < report.test_days.size(); ++d) {
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t v = 0; v < report.variants.size(); ++v) {
      const auto& c = report.cells[d][v];
      row[report.variants[v]] =
          c.ok() ? nlohmann::json{{"r2", real_to_json(c.r2)}}
                 : nlohmann::json{{"error", c.error}};
    }
    cells.push_back({{"day", report.test_days[d]}, {"scores", std::move(row)}});
  }
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& s : report.summary()) {
    summary.push_back({{"variant", s.variant},
                       {"mean_r2", real_to_json(s.mean_r2)},
                       {"scored_days", s.scored_days},
                       {"failed_days", s.failed_days}});
  }
  return {{"format", "clickstack.report"},
          {"version", 1},
          {"test_days", report.test_days},
          {"variants", report.variants},
          {"days", std::move(cells)},
          {"summary", std::move(summary)},
          {"manifest", report.manifest}};
}

EvaluationReport report_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != "clickstack.report" ||
      j.value("version", 0) != 1) {
    throw Error(ErrorCode::kParseError, "not a version-1 clickstack report");
  }
  EvaluationReport report;
  try {
    report.test_days = j.at("test_days").get<std::vector<std::string>>();
    report.variants = j.at("variants").get<std::vector<std::string>>();
    report.manifest = j.value("manifest", nlohmann::json::object());
    const auto& days = j.at("days");
    if (days.size() != report.test_days.size()) {
      throw Error(ErrorCode::kParseError, "day count mismatch");
    }
    for (const auto& day : days) {
      std::vector<ReportCell> row;
      const auto& scores = day.at("scores");
      for (const auto& variant : report.variants) {
        const auto& c = scores.at(variant);
        if (c.contains("error")) {
          row.push_back({kNaN, c.at("error").get<std::string>()});
        } else {
          row.push_back({real_from_json(c.at("r2")), ""});
        }
      }
      report.cells.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("report: ") + e.what());
  }
  return report;
}

std::string render_report(const EvaluationReport& report, ReportFormat fmt) {
  switch (fmt) {
    case ReportFormat::kJson:
      return render_json(report);
    case ReportFormat::kCsv:
      return render_csv(report);
    case ReportFormat::kMarkdown:
      return render_markdown(report);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown report format");
}

void render_report(const EvaluationReport& report, ReportFormat fmt,
                   const std::filesystem::path& path) {
  const std::string text = render_report(report, fmt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  }
  out << text;
  if (!out.flush()) {
    throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  }
}

}  // namespace clickstack
