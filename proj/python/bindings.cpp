#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rsmrac/cli.hpp"

namespace py = pybind11;
using namespace rsm;

namespace {

py::dict solution_dict(const SocpSolution& s) {
    py::dict d;
    d["r"] = s.r;
    d["eta"] = s.eta;
    d["v"] = s.v;
    d["status"] = to_string(s.status);
    d["objective"] = s.objective;
    d["kkt_residual"] = s.kkt_residual;
    d["iterations"] = s.iterations;
    return d;
}

ScenarioConfig parse_cfg(const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return ScenarioConfig{};
    return config_from_json(nlohmann::json::parse(text));
}

py::dict run_dict(const std::string& config_json, const std::string& filter) {
    ScenarioConfig cfg = parse_cfg(config_json);
    if (!filter.empty()) cfg.filter = parse_filter(filter);
    FilterOutcome o;
    {
        py::gil_scoped_release nogil;
        o = execute(cfg);
    }
    const auto& rows = o.trace.rows;
    const int K = int(rows.size());
    Mat xp(K, 6), xm(K, 6), r(K, 3), rs(K, 3), u(K, 3);
    Vec t(K), hp(K), hr(K), delta(K), V(K), ex(K);
    for (int k = 0; k < K; ++k) {
        t[k] = rows[k].t;
        xp.row(k) = rows[k].x_p.transpose();
        xm.row(k) = rows[k].x_m.transpose();
        r.row(k) = rows[k].r.transpose();
        rs.row(k) = rows[k].r_star.transpose();
        u.row(k) = rows[k].u.transpose();
        hp[k] = rows[k].h_plant;
        hr[k] = rows[k].h_ref;
        delta[k] = rows[k].delta;
        V[k] = rows[k].V;
        ex[k] = rows[k].e_x_norm;
    }
    py::dict d;
    d["filter"] = to_string(o.filter);
    d["t"] = t;
    d["x_p"] = xp;
    d["x_m"] = xm;
    d["r"] = r;
    d["r_star"] = rs;
    d["u"] = u;
    d["h_plant"] = hp;
    d["h_ref"] = hr;
    d["delta"] = delta;
    d["V"] = V;
    d["e_x_norm"] = ex;
    d["summary"] = py::module_::import("json").attr("loads")(summary_to_json(o.summary).dump());
    return d;
}

}  // namespace

PYBIND11_MODULE(_rsmrac, m) {
    m.doc() = "Robust safe MRAC core";

    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);

    m.def("solve_lyapunov", &solve_lyapunov, py::arg("A"), py::arg("Q"),
          "P with A^T P + P A = -Q");
    m.def("is_hurwitz", &is_hurwitz, py::arg("A"));
    m.def("qp_single_constraint", &qp_single_constraint, py::arg("u_star"), py::arg("a"), py::arg("b"));

    m.def(
        "socp_solve",
        [](const Vec& r_star, double rho, const Vec& a, double c, double beta) {
            return solution_dict(socp_solve({r_star, rho, a, c, beta}));
        },
        py::arg("r_star"), py::arg("rho"), py::arg("a"), py::arg("c"), py::arg("beta"));
    m.def(
        "socp_oracle",
        [](const Vec& r_star, double rho, const Vec& a, double c, double beta) {
            return solution_dict(socp_oracle({r_star, rho, a, c, beta}));
        },
        py::arg("r_star"), py::arg("rho"), py::arg("a"), py::arg("c"), py::arg("beta"));

    m.def(
        "default_config", [] { return config_to_json(ScenarioConfig{}).dump(); },
        "default scenario as a JSON string");
    m.def(
        "config_fingerprint", [](const std::string& text) { return config_fingerprint(parse_cfg(text)); },
        py::arg("config_json"));
    m.def("run", &run_dict, py::arg("config_json") = "", py::arg("filter") = "",
          "simulate one scenario; returns arrays and the summary");

    m.def(
        "oracle_check",
        [](int count, std::uint64_t seed) {
            OracleReport r = oracle_suite(count, seed);
            py::dict d;
            d["count"] = r.count;
            d["max_gap"] = r.max_gap;
            d["max_kkt"] = r.max_kkt;
            d["failures"] = r.failures;
            return d;
        },
        py::arg("count") = 100, py::arg("seed") = 1);
    m.def(
        "cmd_run",
        [](const std::string& cfg, const std::string& out) {
            std::ostringstream log;
            py::gil_scoped_release nogil;
            return cmd_run(cfg, out, log);
        },
        py::arg("config"), py::arg("out"));
    m.def(
        "cmd_compare",
        [](const std::string& cfg, const std::string& filters, const std::string& out) {
            std::ostringstream log;
            py::gil_scoped_release nogil;
            return cmd_compare(cfg, filters, out, log);
        },
        py::arg("config"), py::arg("filters"), py::arg("out"));

    m.attr("__version__") = kVersion;
}
