#include "rsmrac/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace rsm {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ConfigError(key + " " + what);
}

void check_keys(const json& j, const std::string& sec, std::initializer_list<const char*> keys) {
    if (!j.is_object()) fail(sec.empty() ? "config" : sec, "must be an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) fail(sec.empty() ? it.key() : sec + "." + it.key(), "is not a known key");
}

double num(const json& v, const std::string& key) {
    if (!v.is_number()) fail(key, "must be a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
}

bool boolean(const json& v, const std::string& key) {
    if (!v.is_boolean()) fail(key, "must be true or false");
    return v.get<bool>();
}

std::string str(const json& v, const std::string& key) {
    if (!v.is_string()) fail(key, "must be a string");
    return v.get<std::string>();
}

Vec vec(const json& v, const std::string& key, int len) {
    if (!v.is_array() || int(v.size()) != len) fail(key, "must be an array of " + std::to_string(len) + " numbers");
    Vec out(len);
    for (int i = 0; i < len; ++i) out[i] = num(v[i], key);
    return out;
}

Mat mat(const json& v, const std::string& key) {
    if (!v.is_array() || v.empty() || !v[0].is_array()) fail(key, "must be an array of rows");
    const int r = int(v.size()), c = int(v[0].size());
    Mat out(r, c);
    for (int i = 0; i < r; ++i) out.row(i) = vec(v[i], key, c).transpose();
    return out;
}

std::optional<double> opt_num(const json& v, const std::string& key) {
    if (v.is_string() && v.get<std::string>() == "auto") return std::nullopt;
    if (v.is_null()) return std::nullopt;
    return num(v, key);
}

json opt_out(const std::optional<double>& v) {
    return v ? json(*v) : json("auto");
}

json vec_out(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json mat_out(const Mat& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i) a.push_back(vec_out(m.row(i).transpose()));
    return a;
}

template <class F>
void with(const json& j, const char* k, F&& f) {
    auto it = j.find(k);
    if (it != j.end()) f(*it);
}

}  // namespace

ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig c;
    if (j.is_null()) return c;
    check_keys(j, "", {"seed", "plant", "reference", "adaptation", "barrier", "budget", "filter",
                       "policy", "initial", "sim", "expect"});

    with(j, "seed", [&](const json& v) {
        if (!v.is_number_unsigned()) fail("seed", "must be a nonnegative integer");
        c.seed = v.get<std::uint64_t>();
    });
    with(j, "plant", [&](const json& s) {
        check_keys(s, "plant", {"mismatch_scale", "mismatch_matrix", "mismatch_mode", "lambda", "drag"});
        with(s, "mismatch_scale", [&](const json& v) { c.mismatch_scale = num(v, "plant.mismatch_scale"); });
        with(s, "mismatch_matrix", [&](const json& v) {
            if (v.is_null()) c.mismatch_matrix.reset();
            else c.mismatch_matrix = mat(v, "plant.mismatch_matrix");
        });
        with(s, "mismatch_mode", [&](const json& v) {
            auto m = str(v, "plant.mismatch_mode");
            if (m == "full") c.mismatch_mode = MismatchMode::Full;
            else if (m == "velocity_rows") c.mismatch_mode = MismatchMode::VelocityRows;
            else fail("plant.mismatch_mode", "must be \"full\" or \"velocity_rows\"");
        });
        with(s, "lambda", [&](const json& v) { c.lambda_sim = vec(v, "plant.lambda", 3); });
        with(s, "drag", [&](const json& v) { c.drag = num(v, "plant.drag"); });
    });
    with(j, "reference", [&](const json& s) {
        check_keys(s, "reference", {"kp", "kd"});
        with(s, "kp", [&](const json& v) { c.kp = num(v, "reference.kp"); });
        with(s, "kd", [&](const json& v) { c.kd = num(v, "reference.kd"); });
    });
    with(j, "adaptation", [&](const json& s) {
        check_keys(s, "adaptation", {"gamma_x", "gamma_r", "q_scale", "init", "lambda_guess",
                                     "projection_bound", "freeze_under_plant_qp", "matching_tol"});
        with(s, "gamma_x", [&](const json& v) { c.gamma_x = num(v, "adaptation.gamma_x"); });
        with(s, "gamma_r", [&](const json& v) { c.gamma_r = num(v, "adaptation.gamma_r"); });
        with(s, "q_scale", [&](const json& v) { c.q_scale = num(v, "adaptation.q_scale"); });
        with(s, "init", [&](const json& v) {
            auto m = str(v, "adaptation.init");
            if (m == "ideal") c.init_ideal = true;
            else if (m == "prior") c.init_ideal = false;
            else fail("adaptation.init", "must be \"prior\" or \"ideal\"");
        });
        with(s, "lambda_guess", [&](const json& v) { c.lambda_guess = vec(v, "adaptation.lambda_guess", 3); });
        with(s, "projection_bound", [&](const json& v) {
            if (v.is_null()) c.projection_bound.reset();
            else c.projection_bound = num(v, "adaptation.projection_bound");
        });
        with(s, "freeze_under_plant_qp", [&](const json& v) {
            c.freeze_adaptation_under_plant_qp = boolean(v, "adaptation.freeze_under_plant_qp");
        });
        with(s, "matching_tol", [&](const json& v) { c.matching_tol = num(v, "adaptation.matching_tol"); });
    });
    with(j, "barrier", [&](const json& s) {
        check_keys(s, "barrier", {"center", "radius", "kind", "kappa"});
        with(s, "center", [&](const json& v) { c.center = vec(v, "barrier.center", 3); });
        with(s, "radius", [&](const json& v) { c.radius = num(v, "barrier.radius"); });
        with(s, "kind", [&](const json& v) {
            auto m = str(v, "barrier.kind");
            if (m == "sphere") c.barrier = BarrierKind::Sphere;
            else if (m == "braking") c.barrier = BarrierKind::Braking;
            else fail("barrier.kind", "must be \"sphere\" or \"braking\"");
        });
        with(s, "kappa", [&](const json& v) { c.kappa = num(v, "barrier.kappa"); });
    });
    with(j, "budget", [&](const json& s) {
        check_keys(s, "budget", {"theta_x_bar", "theta_r_bar", "lambda_bar", "L1", "L2", "vmax",
                                 "lipschitz_samples", "lipschitz_safety", "region_inflation", "headroom"});
        with(s, "theta_x_bar", [&](const json& v) { c.theta_x_bar = opt_num(v, "budget.theta_x_bar"); });
        with(s, "theta_r_bar", [&](const json& v) { c.theta_r_bar = opt_num(v, "budget.theta_r_bar"); });
        with(s, "lambda_bar", [&](const json& v) { c.lambda_bar = opt_num(v, "budget.lambda_bar"); });
        with(s, "L1", [&](const json& v) { c.L1 = opt_num(v, "budget.L1"); });
        with(s, "L2", [&](const json& v) { c.L2 = opt_num(v, "budget.L2"); });
        with(s, "vmax", [&](const json& v) { c.vmax = opt_num(v, "budget.vmax"); });
        with(s, "lipschitz_samples", [&](const json& v) {
            if (!v.is_number_integer()) fail("budget.lipschitz_samples", "must be an integer");
            c.lipschitz_samples = v.get<int>();
        });
        with(s, "lipschitz_safety", [&](const json& v) { c.lipschitz_safety = num(v, "budget.lipschitz_safety"); });
        with(s, "region_inflation", [&](const json& v) { c.region_inflation = num(v, "budget.region_inflation"); });
        with(s, "headroom", [&](const json& v) { c.headroom = num(v, "budget.headroom"); });
    });
    with(j, "filter", [&](const json& s) {
        check_keys(s, "filter", {"kind", "gamma", "rho", "authority_d", "socp_tol", "socp_max_iters"});
        with(s, "kind", [&](const json& v) {
            try {
                c.filter = parse_filter(str(v, "filter.kind"));
            } catch (const ConfigError&) {
                throw;
            } catch (const ModelError& e) {
                fail("filter.kind", std::string("is invalid: ") + e.what());
            }
        });
        with(s, "gamma", [&](const json& v) { c.gamma = num(v, "filter.gamma"); });
        with(s, "rho", [&](const json& v) { c.rho = num(v, "filter.rho"); });
        with(s, "authority_d", [&](const json& v) { c.authority_d = num(v, "filter.authority_d"); });
        with(s, "socp_tol", [&](const json& v) { c.socp.tol = num(v, "filter.socp_tol"); });
        with(s, "socp_max_iters", [&](const json& v) {
            if (!v.is_number_integer()) fail("filter.socp_max_iters", "must be an integer");
            c.socp.max_iters = v.get<int>();
        });
    });
    with(j, "policy", [&](const json& s) {
        check_keys(s, "policy", {"goal", "k_goal", "r_max"});
        with(s, "goal", [&](const json& v) { c.goal = vec(v, "policy.goal", 3); });
        with(s, "k_goal", [&](const json& v) { c.k_goal = num(v, "policy.k_goal"); });
        with(s, "r_max", [&](const json& v) { c.r_max = num(v, "policy.r_max"); });
    });
    with(j, "initial", [&](const json& s) {
        check_keys(s, "initial", {"position", "velocity", "ref_position_offset", "ref_velocity_offset"});
        with(s, "position", [&](const json& v) { c.start_position = vec(v, "initial.position", 3); });
        with(s, "velocity", [&](const json& v) { c.start_velocity = vec(v, "initial.velocity", 3); });
        with(s, "ref_position_offset", [&](const json& v) {
            c.ref_position_offset = vec(v, "initial.ref_position_offset", 3);
        });
        with(s, "ref_velocity_offset", [&](const json& v) {
            c.ref_velocity_offset = vec(v, "initial.ref_velocity_offset", 3);
        });
    });
    with(j, "sim", [&](const json& s) {
        check_keys(s, "sim", {"dt", "horizon"});
        with(s, "dt", [&](const json& v) { c.dt = num(v, "sim.dt"); });
        with(s, "horizon", [&](const json& v) { c.horizon = num(v, "sim.horizon"); });
    });
    with(j, "expect", [&](const json& s) {
        if (!s.is_object()) fail("expect", "must be an object");
        for (auto it = s.begin(); it != s.end(); ++it) {
            const std::string key = "expect." + it.key();
            FilterKind f;
            try {
                f = parse_filter(it.key());
            } catch (const ModelError&) {
                fail(key, "is not a known filter");
            }
            if (!it->is_string()) fail(key, "must be \"safe\" or \"unsafe\"");
            auto m = it->get<std::string>();
            if (m != "safe" && m != "unsafe") fail(key, "must be \"safe\" or \"unsafe\"");
            c.expect_safe[to_string(f)] = m == "safe";
        }
    });
    validate_config(c);
    return c;
}

json config_to_json(const ScenarioConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["plant"] = {{"mismatch_scale", c.mismatch_scale},
                  {"mismatch_matrix", c.mismatch_matrix ? mat_out(*c.mismatch_matrix) : json(nullptr)},
                  {"mismatch_mode", c.mismatch_mode == MismatchMode::Full ? "full" : "velocity_rows"},
                  {"lambda", vec_out(c.lambda_sim)},
                  {"drag", c.drag}};
    j["reference"] = {{"kp", c.kp}, {"kd", c.kd}};
    j["adaptation"] = {{"gamma_x", c.gamma_x},
                       {"gamma_r", c.gamma_r},
                       {"q_scale", c.q_scale},
                       {"init", c.init_ideal ? "ideal" : "prior"},
                       {"lambda_guess", vec_out(c.lambda_guess)},
                       {"projection_bound", c.projection_bound ? json(*c.projection_bound) : json(nullptr)},
                       {"freeze_under_plant_qp", c.freeze_adaptation_under_plant_qp},
                       {"matching_tol", c.matching_tol}};
    j["barrier"] = {{"center", vec_out(c.center)},
                    {"radius", c.radius},
                    {"kind", c.barrier == BarrierKind::Sphere ? "sphere" : "braking"},
                    {"kappa", c.kappa}};
    j["budget"] = {{"theta_x_bar", opt_out(c.theta_x_bar)},
                   {"theta_r_bar", opt_out(c.theta_r_bar)},
                   {"lambda_bar", opt_out(c.lambda_bar)},
                   {"L1", opt_out(c.L1)},
                   {"L2", opt_out(c.L2)},
                   {"vmax", opt_out(c.vmax)},
                   {"lipschitz_samples", c.lipschitz_samples},
                   {"lipschitz_safety", c.lipschitz_safety},
                   {"region_inflation", c.region_inflation},
                   {"headroom", c.headroom}};
    j["filter"] = {{"kind", to_string(c.filter)},
                   {"gamma", c.gamma},
                   {"rho", c.rho},
                   {"authority_d", c.authority_d},
                   {"socp_tol", c.socp.tol},
                   {"socp_max_iters", c.socp.max_iters}};
    j["policy"] = {{"goal", vec_out(c.goal)}, {"k_goal", c.k_goal}, {"r_max", c.r_max}};
    j["initial"] = {{"position", vec_out(c.start_position)},
                    {"velocity", vec_out(c.start_velocity)},
                    {"ref_position_offset", vec_out(c.ref_position_offset)},
                    {"ref_velocity_offset", vec_out(c.ref_velocity_offset)}};
    j["sim"] = {{"dt", c.dt}, {"horizon", c.horizon}};
    json e = json::object();
    for (const auto& [k, v] : c.expect_safe) e[k] = v ? "safe" : "unsafe";
    j["expect"] = e;
    return j;
}

void validate_config(const ScenarioConfig& c) {
    auto pos = [](double v, const char* key) {
        if (!(v > 0)) fail(key, "must be positive");
    };
    auto pos_opt = [&](const std::optional<double>& v, const char* key) {
        if (v) pos(*v, key);
    };
    pos(c.mismatch_scale, "plant.mismatch_scale");
    if (c.mismatch_matrix) {
        const auto& m = *c.mismatch_matrix;
        bool ok = m.rows() == m.cols() &&
                  (m.rows() == 6 || (c.mismatch_mode == MismatchMode::VelocityRows && m.rows() == 3));
        if (!ok) fail("plant.mismatch_matrix", "must be 6x6 (or 3x3 with velocity_rows)");
    }
    if (!(c.lambda_sim.array() > 0).all()) fail("plant.lambda", "entries must be positive");
    if (!(c.drag >= 0)) fail("plant.drag", "must be nonnegative");
    pos(c.kp, "reference.kp");
    pos(c.kd, "reference.kd");
    pos(c.gamma_x, "adaptation.gamma_x");
    pos(c.gamma_r, "adaptation.gamma_r");
    pos(c.q_scale, "adaptation.q_scale");
    if (!(c.lambda_guess.array() > 0).all()) fail("adaptation.lambda_guess", "entries must be positive");
    pos_opt(c.projection_bound, "adaptation.projection_bound");
    pos(c.matching_tol, "adaptation.matching_tol");
    pos(c.radius, "barrier.radius");
    pos(c.kappa, "barrier.kappa");
    pos_opt(c.theta_x_bar, "budget.theta_x_bar");
    pos_opt(c.theta_r_bar, "budget.theta_r_bar");
    pos_opt(c.lambda_bar, "budget.lambda_bar");
    pos_opt(c.L1, "budget.L1");
    pos_opt(c.L2, "budget.L2");
    pos_opt(c.vmax, "budget.vmax");
    if (c.lipschitz_samples < 1000) fail("budget.lipschitz_samples", "must be at least 1000");
    if (!(c.lipschitz_safety >= 1)) fail("budget.lipschitz_safety", "must be at least 1");
    if (!(c.region_inflation >= 0)) fail("budget.region_inflation", "must be nonnegative");
    if (!(c.headroom >= 1)) fail("budget.headroom", "must be at least 1");
    pos(c.gamma, "filter.gamma");
    pos(c.rho, "filter.rho");
    if (!(c.authority_d >= 0)) fail("filter.authority_d", "must be nonnegative");
    pos(c.socp.tol, "filter.socp_tol");
    if (c.socp.max_iters < 1) fail("filter.socp_max_iters", "must be at least 1");
    if (!(c.k_goal >= 0)) fail("policy.k_goal", "must be nonnegative");
    pos(c.r_max, "policy.r_max");
    pos(c.dt, "sim.dt");
    if (!(c.horizon >= c.dt)) fail("sim.horizon", "must be at least sim.dt");
    if ((c.start_position - c.center).norm() < c.radius)
        fail("initial.position", "must lie outside the obstacle");
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return ScenarioConfig{};
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::string config_fingerprint(const ScenarioConfig& cfg) {
    const std::string s = config_to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace rsm
