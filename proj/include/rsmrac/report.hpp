#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsmrac/config.hpp"
#include "rsmrac/sim.hpp"

namespace rsm {

inline constexpr const char* kSchemaVersion = "rsmrac-trace/1";
inline constexpr const char* kVersion = "0.1.0";

std::vector<std::string> trace_columns(int n, int m, int p);
void write_trace_csv(std::ostream& os, const SimTrace& tr);
void write_trace_csv(const std::string& path, const SimTrace& tr);

nlohmann::json summary_to_json(const Summary& s);
nlohmann::json summary_document(const ScenarioConfig& cfg, const SimTrace& tr, const Summary& s);

struct FilterOutcome {
    FilterKind filter;
    SimTrace trace;
    Summary summary;
};

// Verdict per filter against cfg.expect_safe; unknown expectation -> "n/a".
std::string expectation_verdict(const ScenarioConfig& cfg, const FilterOutcome& o);
nlohmann::json comparison_document(const ScenarioConfig& cfg, const std::vector<FilterOutcome>& runs,
                                   const std::string& timestamp);
// Long format: filter, t, p_x, p_y, p_z, m_x, m_y, m_z, h_plant
void write_trajectories_csv(const std::string& path, const std::vector<FilterOutcome>& runs);

void write_text(const std::string& path, const std::string& text);   // throws std::runtime_error

}  // namespace rsm
