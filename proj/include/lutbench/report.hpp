#pragma once

// Serialization of evaluation reports: JSON, per-wavelength CSV, the summary
// table (CSV and aligned text) and standalone SVG figures.

#include "lutbench/metrics.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace lutbench {

nlohmann::json report_to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

void write_report_json(const EvalReport& r, const std::string& path);
/// One row per wavelength: wavelength, rmse, nrmse, mean_relative and the
/// residual percentiles. No timing columns.
void write_report_csv(const EvalReport& r, const std::string& path);

/// Summary columns; the trailing `_seconds` columns are measured, the rest derived.
inline constexpr const char* kSummaryColumns[] = {
    "method",          "lut_size",       "components",   "rmse_mean",
    "nrmse_mean",      "evaluated",      "failed",       "build_seconds",
    "query_seconds",   "total_seconds"};

void write_summary_csv(const std::vector<EvalReport>& reports, const std::string& path);
std::string summary_text(const std::vector<EvalReport>& reports);
void write_text(const std::string& text, const std::string& path);

/// Per-wavelength mean and percentile bands of the relative residuals, one
/// panel per report.
std::string residual_figure_svg(const std::vector<EvalReport>& reports);
/// Horizontal bars of build and query time per report.
std::string runtime_figure_svg(const std::vector<EvalReport>& reports);

/// Drops every CSV column whose header ends in "_seconds".
std::string strip_timing_columns(const std::string& csv);

/// Reads a whole file; throws IoError.
std::string read_text(const std::string& path);

}  // namespace lutbench
