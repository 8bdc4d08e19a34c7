#pragma once

// Sectioned key = value scenario files (grammar in docs/scenario-format.md).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "teleop/sim.hpp"

namespace teleop {

/// Throws ParseError (with line and section) for malformed text, unknown
/// sections or keys; ValidationError for missing fields or invariant breaks.
SimScenario parse_scenario(std::string_view text);
SimScenario load_scenario(const std::filesystem::path& path);

/// Canonical text form; parse_scenario(serialize_scenario(sc)) == sc.
std::string serialize_scenario(const SimScenario& sc);
void save_scenario(const std::filesystem::path& path, const SimScenario& sc);

/// 16 hex digits, FNV-1a over the canonical text.
std::string scenario_hash(const SimScenario& sc);

const char* to_string(ControlMode m);
const char* to_string(DerivativeKernel k);
const char* to_string(GridSpacing s);
const char* to_string(Criterion c);
const char* to_string(BracketStatus s);

}  // namespace teleop
