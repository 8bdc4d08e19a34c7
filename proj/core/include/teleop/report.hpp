#pragma once

// Machine-readable analysis report (JSON). Every number carries its units
// and every verdict names its criterion; `schema_version` is bumped on any
// incompatible change.

#include <optional>
#include <string>
#include <vector>

#include "teleop/sim.hpp"
#include "teleop/stability.hpp"

namespace teleop {

inline constexpr int kReportSchemaVersion = 1;

const char* tool_version();

struct Provenance {
  std::string scenario_hash;
  std::uint64_t seed = 0;
  std::size_t grid_size = 0;
  std::string tool_version;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct AnalysisReport {
  int schema_version = kReportSchemaVersion;
  Provenance provenance;
  StabilityReport stability;
  std::optional<SimVerdict> simulation;
  std::optional<PeriodSearch> period_search;
  std::optional<Criterion> period_criterion;
};

AnalysisReport make_report(const SimScenario& sc, const StabilityReport& stability);

std::string to_json(const AnalysisReport& r, int indent = 2);
/// Throws ParseError on malformed documents or a schema_version mismatch.
AnalysisReport report_from_json(const std::string& text);

bool operator==(const AnalysisReport& a, const AnalysisReport& b);

/// CSV table `T,small_gain_value,small_gain_pass,eq21_bound,eq21_pass,bounded,
/// max_abs_position,settling_ok,final_velocity_max,error`.
std::string sweep_table_csv(const std::vector<SweepRow>& rows);

}  // namespace teleop
