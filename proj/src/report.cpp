#include "rsmrac/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rsm {

using nlohmann::json;

namespace {

// Shortest text that round-trips the double exactly.
void put(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

void put_vec(std::ostream& os, const Vec& v) {
    for (int i = 0; i < v.size(); ++i) {
        os << ',';
        put(os, v[i]);
    }
}

}  // namespace

std::vector<std::string> trace_columns(int n, int m, int p) {
    std::vector<std::string> c{"t"};
    auto block = [&](const char* name, int k) {
        for (int i = 0; i < k; ++i) c.push_back(std::string(name) + "[" + std::to_string(i) + "]");
    };
    block("x_p", n);
    block("x_m", n);
    block("r_star", p);
    block("r", p);
    block("u", m);
    for (const char* s : {"e_x_norm", "h_plant", "h_ref", "e_h", "delta", "beta", "eta", "V",
                          "filter_status", "authority", "budget_flags"})
        c.push_back(s);
    return c;
}

void write_trace_csv(std::ostream& os, const SimTrace& tr) {
    auto cols = trace_columns(tr.n, tr.m, tr.p);
    for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : tr.rows) {
        put(os, r.t);
        put_vec(os, r.x_p);
        put_vec(os, r.x_m);
        put_vec(os, r.r_star);
        put_vec(os, r.r);
        put_vec(os, r.u);
        for (double v : {r.e_x_norm, r.h_plant, r.h_ref, r.e_h, r.delta, r.beta, r.eta, r.V}) {
            os << ',';
            put(os, v);
        }
        os << ',' << r.filter_status << ',' << to_string(r.authority) << ',' << r.budget_flags << '\n';
    }
}

void write_trace_csv(const std::string& path, const SimTrace& tr) {
    std::ostringstream ss;
    write_trace_csv(ss, tr);
    write_text(path, ss.str());
}

json summary_to_json(const Summary& s) {
    return {{"min_h_plant", s.min_h_plant},
            {"min_h_ref", s.min_h_ref},
            {"terminal_goal_distance", s.terminal_goal_distance},
            {"terminal_tracking_error", s.terminal_tracking_error},
            {"terminal_output_error", s.terminal_output_error},
            {"control_effort", s.control_effort},
            {"smoothness", s.smoothness},
            {"fault_count", s.fault_count},
            {"budget_violation_count", s.budget_violation_count},
            {"assumption3_flag_count", s.assumption3_flag_count},
            {"authority_violation_count", s.authority_violation_count},
            {"eta_slack_count", s.eta_slack_count},
            {"delta_mean_first_quarter", s.delta_mean_first_quarter},
            {"delta_mean_last_quarter", s.delta_mean_last_quarter},
            {"max_r_norm", s.max_r_norm},
            {"sup_theta_x_err", s.sup_theta_x_err},
            {"sup_theta_r_err", s.sup_theta_r_err},
            {"steps", s.steps},
            {"aborted", s.aborted}};
}

namespace {

json budget_json(const ResolvedBudget& rb) {
    const auto& b = rb.budget;
    return {{"theta_x_bar", b.theta_x_bar},
            {"theta_r_bar", b.theta_r_bar},
            {"lambda_bar", b.lambda_bar},
            {"L1", b.lipschitz.L1},
            {"L2", b.lipschitz.L2},
            {"vmax", rb.vmax},
            {"gamma", b.gamma},
            {"provenance", rb.provenance}};
}

json versions() {
    return {{"rsmrac", kVersion},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

}  // namespace

json summary_document(const ScenarioConfig& cfg, const SimTrace& tr, const Summary& s) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["versions"] = versions();
    j["config_fingerprint"] = config_fingerprint(cfg);
    j["filter"] = to_string(tr.filter);
    j["metrics"] = summary_to_json(s);
    j["budget"] = budget_json(tr.budget);
    j["abort_reason"] = tr.abort_reason;
    j["columns"] = trace_columns(tr.n, tr.m, tr.p);
    return j;
}

std::string expectation_verdict(const ScenarioConfig& cfg, const FilterOutcome& o) {
    auto it = cfg.expect_safe.find(to_string(o.filter));
    if (it == cfg.expect_safe.end()) return "n/a";
    bool safe = o.summary.min_h_plant >= 0.0;
    return safe == it->second ? "PASS" : "FAIL";
}

json comparison_document(const ScenarioConfig& cfg, const std::vector<FilterOutcome>& runs,
                         const std::string& timestamp) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["versions"] = versions();
    j["config_fingerprint"] = config_fingerprint(cfg);
    j["timestamp"] = timestamp;
    json rows = json::array();
    bool all = true;
    for (const auto& o : runs) {
        std::string v = expectation_verdict(cfg, o);
        all = all && v != "FAIL";
        auto it = cfg.expect_safe.find(to_string(o.filter));
        rows.push_back({{"filter", to_string(o.filter)},
                        {"safe", o.summary.min_h_plant >= 0.0},
                        {"expected", it == cfg.expect_safe.end() ? json(nullptr)
                                                                 : json(it->second ? "safe" : "unsafe")},
                        {"verdict", v},
                        {"metrics", summary_to_json(o.summary)},
                        {"budget", budget_json(o.trace.budget)}});
    }
    j["filters"] = rows;
    j["verdict"] = all ? "PASS" : "FAIL";
    return j;
}

void write_trajectories_csv(const std::string& path, const std::vector<FilterOutcome>& runs) {
    std::ostringstream os;
    os << "filter,t,p_x,p_y,p_z,m_x,m_y,m_z,h_plant\n";
    for (const auto& o : runs) {
        for (const auto& r : o.trace.rows) {
            os << to_string(o.filter) << ',';
            put(os, r.t);
            put_vec(os, r.x_p.head(3));
            put_vec(os, r.x_m.head(3));
            os << ',';
            put(os, r.h_plant);
            os << '\n';
        }
    }
    write_text(path, os.str());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace rsm
