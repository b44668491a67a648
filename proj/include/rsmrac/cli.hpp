#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "rsmrac/report.hpp"
#include "rsmrac/solvers.hpp"

namespace rsm {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitFault = 2 };

// RSMRAC_LOG = quiet | info | debug (default info)
enum class LogLevel { Quiet, Info, Debug };
LogLevel log_level();

// Soft-fault rule for one run: solver faults or an aborted run always count;
// budget and authority flags count for the robust filter only.
bool run_has_fault(const FilterOutcome& o);

FilterOutcome execute(const ScenarioConfig& cfg);   // run + metrics

int cmd_run(const std::string& config_path, const std::string& out_dir, std::ostream& log);
int cmd_compare(const std::string& config_path, const std::string& filters, const std::string& out_dir,
                std::ostream& log, bool stamp = true);
int cmd_oracle_check(int count, std::uint64_t seed, std::ostream& log);

// Random feasible instance, p in {1, 2, 3}.
SocpProblem random_socp_problem(std::mt19937_64& rng);

struct OracleReport {
    int count = 0;
    double max_gap = 0.0;   // relative objective gap vs the grid oracle
    double max_kkt = 0.0;
    int failures = 0;       // non-optimal solver status
};
OracleReport oracle_suite(int count, std::uint64_t seed);

std::vector<FilterKind> parse_filter_list(const std::string& csv);   // throws ModelError

}  // namespace rsm
