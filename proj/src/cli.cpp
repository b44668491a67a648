#include "rsmrac/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <future>
#include <sstream>

namespace rsm {

namespace fs = std::filesystem;

LogLevel log_level() {
    const char* v = std::getenv("RSMRAC_LOG");
    if (!v) return LogLevel::Info;
    std::string s(v);
    if (s == "quiet" || s == "0" || s == "error") return LogLevel::Quiet;
    if (s == "debug" || s == "2") return LogLevel::Debug;
    return LogLevel::Info;
}

namespace {

struct Log {
    std::ostream& os;
    LogLevel lvl = log_level();
    template <class... A>
    void info(const A&... a) {
        if (lvl != LogLevel::Quiet) ((os << a), ...) << '\n';
    }
    template <class... A>
    void debug(const A&... a) {
        if (lvl == LogLevel::Debug) ((os << a), ...) << '\n';
    }
    template <class... A>
    void error(const A&... a) {
        os << "error: ";
        ((os << a), ...) << '\n';
    }
};

std::string utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_run(const fs::path& dir, const ScenarioConfig& cfg, const FilterOutcome& o) {
    fs::create_directories(dir);
    write_trace_csv((dir / "trace.csv").string(), o.trace);
    write_text((dir / "summary.json").string(), summary_document(cfg, o.trace, o.summary).dump(2) + "\n");
}

}  // namespace

bool run_has_fault(const FilterOutcome& o) {
    if (o.summary.fault_count > 0 || o.summary.aborted) return true;
    if (o.filter == FilterKind::RobustSOCP)
        return o.summary.budget_violation_count > 0 || o.summary.authority_violation_count > 0;
    return false;
}

FilterOutcome execute(const ScenarioConfig& cfg) {
    FilterOutcome o{cfg.filter, run_scenario(cfg), {}};
    o.summary = metrics(o.trace);
    return o;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, std::ostream& os) {
    Log log{os};
    try {
        ScenarioConfig cfg = load_config(config_path);
        log.debug("config ", config_fingerprint(cfg), " filter=", to_string(cfg.filter));
        FilterOutcome o = execute(cfg);
        write_run(out_dir, cfg, o);
        const auto& s = o.summary;
        log.info("run ", to_string(cfg.filter), ": steps=", s.steps, " min_h_plant=", s.min_h_plant,
                 " faults=", s.fault_count, " budget_flags=", s.budget_violation_count,
                 " smoothness=", s.smoothness);
        if (run_has_fault(o)) {
            log.info("soft fault: see summary.json");
            return kExitFault;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        log.error(e.what());
        return kExitError;
    }
}

std::vector<FilterKind> parse_filter_list(const std::string& csv) {
    std::vector<FilterKind> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        FilterKind f = parse_filter(item);
        if (std::find(out.begin(), out.end(), f) != out.end())
            throw ModelError("filter '" + item + "' listed twice");
        out.push_back(f);
    }
    if (out.empty()) throw ModelError("empty filter list");
    return out;
}

int cmd_compare(const std::string& config_path, const std::string& filters, const std::string& out_dir,
                std::ostream& os, bool stamp) {
    Log log{os};
    try {
        ScenarioConfig base = load_config(config_path);
        auto kinds = parse_filter_list(filters);
        std::vector<std::future<FilterOutcome>> jobs;
        for (FilterKind f : kinds) {
            ScenarioConfig cfg = base;
            cfg.filter = f;
            jobs.push_back(std::async(std::launch::async, [cfg, out_dir] {
                FilterOutcome o = execute(cfg);
                write_run(fs::path(out_dir) / to_string(cfg.filter), cfg, o);
                return o;
            }));
        }
        std::vector<FilterOutcome> runs;
        for (auto& j : jobs) runs.push_back(j.get());

        auto doc = comparison_document(base, runs, stamp ? utc_now() : "");
        write_text((fs::path(out_dir) / "comparison.json").string(), doc.dump(2) + "\n");
        write_trajectories_csv((fs::path(out_dir) / "trajectories.csv").string(), runs);

        bool fault = false;
        for (const auto& o : runs) {
            log.info(to_string(o.filter), ": min_h_plant=", o.summary.min_h_plant,
                     " smoothness=", o.summary.smoothness, " faults=", o.summary.fault_count,
                     " verdict=", expectation_verdict(base, o));
            fault = fault || run_has_fault(o);
        }
        log.info("comparison verdict: ", doc["verdict"].get<std::string>());
        return (fault || doc["verdict"] == "FAIL") ? kExitFault : kExitOk;
    } catch (const std::exception& e) {
        log.error(e.what());
        return kExitError;
    }
}

SocpProblem random_socp_problem(std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::uniform_int_distribution<int> P(1, 3);
    for (;;) {
        SocpProblem pr;
        const int p = P(rng);
        pr.r_star = Vec(p);
        pr.a = Vec(p);
        for (int i = 0; i < p; ++i) pr.r_star[i] = 2.0 * N(rng);
        for (int i = 0; i < p; ++i) pr.a[i] = N(rng);
        pr.rho = 0.02 + U(rng);
        const double an = pr.a.norm();
        // mostly inside the authority region, sometimes past it
        pr.c = U(rng) < 0.85 ? 0.9 * U(rng) * an : an * (1.0 + U(rng));
        pr.beta = 3.0 * N(rng);
        if (an <= pr.c && pr.beta > 0) continue;
        if (an < 0.05) continue;
        return pr;
    }
}

OracleReport oracle_suite(int count, std::uint64_t seed) {
    OracleReport rep;
    rep.count = count;
    std::mt19937_64 rng(seed);
    SocpSolver solver;
    for (int i = 0; i < count; ++i) {
        SocpProblem pr = random_socp_problem(rng);
        SocpSolution s = solver.solve(pr);
        if (s.status != SocpStatus::Optimal) {
            ++rep.failures;
            continue;
        }
        SocpSolution o = socp_oracle(pr);
        double gap = std::abs(s.objective - o.objective) / std::max(1.0, std::abs(o.objective));
        rep.max_gap = std::max(rep.max_gap, gap);
        rep.max_kkt = std::max(rep.max_kkt, socp_kkt(pr, s).max());
    }
    return rep;
}

int cmd_oracle_check(int count, std::uint64_t seed, std::ostream& os) {
    Log log{os};
    if (count < 0) {
        log.error("--count must be nonnegative");
        return kExitError;
    }
    if (count == 0) {
        log.info("warning: empty instance suite, nothing checked");
        return kExitOk;
    }
    OracleReport r = oracle_suite(count, seed);
    char buf[160];
    std::snprintf(buf, sizeof buf, "oracle-check: count=%d seed=%llu max_rel_gap=%.3e max_kkt=%.3e failures=%d",
                  r.count, static_cast<unsigned long long>(seed), r.max_gap, r.max_kkt, r.failures);
    os << buf << '\n';
    bool ok = r.failures == 0 && r.max_gap <= 1e-4 && r.max_kkt <= 1e-6;
    return ok ? kExitOk : kExitFault;
}

}  // namespace rsm
