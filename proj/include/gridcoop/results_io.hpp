#pragma once

#include "gridcoop/simulation.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gridcoop {

/// Long-format step table, one row per step per agent:
///   time,agent,bus,ghi,load_mult,v_pu,p_avail_kw,q_avail_kvar,p_kw,q_kvar,alpha,f_v,loss_kw,loss_kvar
/// Numbers use the shortest text that parses back to the same double.
void write_step_csv(std::ostream& out, const ScenarioResults& results);
std::string step_csv(const ScenarioResults& results);

/// Inverse of write_step_csv. Fills agent ids, buses and steps only.
/// Throws ParseError on malformed rows.
ScenarioResults read_step_csv(std::string_view csv);

nlohmann::json summary_json(const ScenarioResults& results, const std::vector<std::optional<double>>& curtailment_pct);

/// Per-method metrics plus the methods ranked by fv_sum_then_square.
/// `runs[0]` is the no-control baseline for curtailment.
nlohmann::json comparison_json(const std::vector<ScenarioResults>& runs);

/// Writes through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace gridcoop
