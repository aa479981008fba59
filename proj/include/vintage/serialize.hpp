#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "vintage/optimize.hpp"

namespace vintage {

nlohmann::json report_to_json(const SolveReport& report, bool include_timing = false);

/// Two-space indented JSON followed by a newline; key order is sorted, so output is stable.
void write_json(std::ostream& os, const nlohmann::json& j);

/// Wide CSV: time,u0,u1_0,...,u1_{n-1}.
void write_control_csv(std::ostream& os, const ControlPath& u);
/// Reads write_control_csv output; rows must be evenly spaced by the grid's cell width.
ControlPath read_control_csv(std::istream& is, const VintageModel& model);

/// Columns age,value.
void write_state_csv(std::ostream& os, const CapitalState& x);
CapitalState read_state_csv(std::istream& is, const AgeGrid& grid);

}  // namespace vintage
