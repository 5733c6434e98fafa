#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "idalc/pipeline.hpp"

namespace idalc {

enum class ReportFormat { kJson, kMarkdown };

ReportFormat parse_report_format(const std::string& name);

// Two decimals, rounded half-to-even on the exact binary value.
std::string format_fixed2(double value);

std::string report_to_json(const RunReport& report);
// Inverse of report_to_json; rejects unknown schema versions.
RunReport report_from_json(std::string_view json);

// Dataset-statistics table for one split.
std::string render_split(const std::string& dataset, const SplitSummary& split);

std::string render_markdown(const RunReport& report);
std::string render_report(const RunReport& report, ReportFormat format);

enum class SweepAxis { kDetector, kStrategy, kQuorum };

SweepAxis parse_sweep_axis(const std::string& name);
std::string sweep_axis_name(SweepAxis axis);

struct SweepCell {
  std::string label;  // e.g. "doc", "km", "MV(>=3)", "No MV"
  RunReport report;
};

// One comparison row per cell.
std::string render_sweep(SweepAxis axis, const std::vector<SweepCell>& cells);

}  // namespace idalc
