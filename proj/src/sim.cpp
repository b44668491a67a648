#include "rsmrac/sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace rsm {

const char* to_string(FilterKind f) {
    switch (f) {
    case FilterKind::None: return "none";
    case FilterKind::PlantQP: return "plant_qp";
    case FilterKind::ReferenceQP: return "reference_qp";
    case FilterKind::RobustSOCP: return "robust_socp";
    }
    return "?";
}

FilterKind parse_filter(const std::string& name) {
    std::string k;
    for (char ch : name)
        if (ch != '_' && ch != '-' && ch != ' ') k += char(std::tolower(static_cast<unsigned char>(ch)));
    if (k == "none") return FilterKind::None;
    if (k == "plantqp") return FilterKind::PlantQP;
    if (k == "referenceqp" || k == "refqp") return FilterKind::ReferenceQP;
    if (k == "robustsocp" || k == "socp") return FilterKind::RobustSOCP;
    throw ModelError("unknown filter '" + name + "' (expected none, plant_qp, reference_qp, robust_socp)");
}

int ScenarioConfig::steps() const {
    return int(std::floor(horizon / dt + 1e-9));
}

Vec rk4_step(const OdeRhs& f, const Vec& x, double t, double dt) {
    auto chk = [](const Vec& k) {
        if (!k.allFinite()) throw ModelError("rk4: non-finite derivative");
        return k;
    };
    Vec k1 = chk(f(t, x));
    Vec k2 = chk(f(t + 0.5 * dt, x + 0.5 * dt * k1));
    Vec k3 = chk(f(t + 0.5 * dt, x + 0.5 * dt * k2));
    Vec k4 = chk(f(t + dt, x + dt * k3));
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vec nominal_reference(const Vec& goal, double k_goal, double r_max, const Vec& p_m) {
    Vec r = k_goal * (goal - p_m);
    return r.cwiseMax(-r_max).cwiseMin(r_max);
}

Scenario build_scenario(const ScenarioConfig& cfg) {
    if (!(cfg.dt > 0)) throw ModelError("sim.dt must be positive");
    if (!(cfg.horizon >= cfg.dt)) throw ModelError("sim.horizon must be at least sim.dt");
    if (!(cfg.rho > 0)) throw ModelError("filter.rho must be positive");
    if (!(cfg.gamma > 0)) throw ModelError("filter.gamma must be positive");
    if (!(cfg.r_max > 0)) throw ModelError("policy.r_max must be positive");
    if (!(cfg.k_goal >= 0)) throw ModelError("policy.k_goal must be nonnegative");
    if (cfg.goal.size() != 3 || cfg.start_position.size() != 3 || cfg.start_velocity.size() != 3 ||
        cfg.ref_position_offset.size() != 3 || cfg.ref_velocity_offset.size() != 3)
        throw ModelError("initial/policy vectors must have 3 entries");

    Scenario sc;
    sc.cfg = cfg;
    sc.goal = cfg.goal;
    if (cfg.mismatch_matrix)
        sc.plant = build_quadrotor_plant(*cfg.mismatch_matrix, cfg.lambda_sim, cfg.drag, cfg.mismatch_mode);
    else
        sc.plant = build_quadrotor_plant(cfg.mismatch_scale, cfg.lambda_sim, cfg.drag, cfg.mismatch_mode);
    sc.ref = build_quadrotor_reference(cfg.kp, cfg.kd);
    sc.A_nom = quadrotor_nominal_A(cfg.drag);
    const double tol = cfg.matching_tol * std::max(1.0, sc.ref.A_m.norm());
    sc.matching = solve_matching_gains(sc.plant, sc.ref, tol);
    sc.gains = AdaptiveGains::make(cfg.gamma_x, cfg.gamma_r, sc.ref,
                                   Mat(cfg.q_scale * Mat::Identity(6, 6)));
    if (cfg.init_ideal) {
        sc.init.theta_x = sc.matching.theta_x;
        sc.init.theta_r = sc.matching.theta_r;
    } else {
        PlantModel guess = PlantModel::make(sc.A_nom, quadrotor_B(), cfg.lambda_guess);
        MatchingGains g0 = solve_matching_gains(guess, sc.ref, tol);
        sc.init.theta_x = g0.theta_x;
        sc.init.theta_r = g0.theta_r;
    }

    Vec c_goal = cfg.center - cfg.goal;
    sc.safety = std::make_shared<SphereBarrier>(c_goal, cfg.radius);
    if (cfg.barrier == BarrierKind::Braking)
        sc.filter_barrier = std::make_shared<BrakingBarrier>(c_goal, cfg.radius, cfg.kappa);
    else
        sc.filter_barrier = sc.safety;

    sc.x_p0 = Vec(6);
    sc.x_p0 << cfg.start_position - cfg.goal, cfg.start_velocity;
    sc.x_m0 = sc.x_p0;
    sc.x_m0.head(3) += cfg.ref_position_offset;
    sc.x_m0.tail(3) += cfg.ref_velocity_offset;
    if (sc.safety->h(sc.x_p0) < 0)
        throw ModelError("initial.position must lie outside the obstacle (h(x_p(0)) >= 0)");

    Eigen::Matrix<double, 3, 3> pts;
    pts << sc.x_p0.head(3), Vec::Zero(3), c_goal;
    Vec lo = pts.rowwise().minCoeff(), hi = pts.rowwise().maxCoeff();
    Vec mid = 0.5 * (lo + hi);
    Vec half = (0.5 * (hi - lo) * (1.0 + cfg.region_inflation)).cwiseMax(cfg.radius);
    sc.region.lo = mid - half;
    sc.region.hi = mid + half;
    return sc;
}

Box lipschitz_region(const Scenario& sc, double vmax) {
    Box b;
    b.lo = Vec(6);
    b.hi = Vec(6);
    b.lo << sc.region.lo, Vec::Constant(3, -vmax);
    b.hi << sc.region.hi, Vec::Constant(3, vmax);
    return b;
}

namespace {

bool inside(const Box& b, const Vec& x) {
    return (x.array() >= b.lo.array()).all() && (x.array() <= b.hi.array()).all();
}

struct Observed {
    double sup_x = 0.0, sup_r = 0.0, vel = 0.0;
};

Observed observe(const SimTrace& tr) {
    Observed o;
    for (const auto& row : tr.rows) {
        o.sup_x = std::max(o.sup_x, row.theta_x_err);
        o.sup_r = std::max(o.sup_r, row.theta_r_err);
        o.vel = std::max({o.vel, row.x_p.tail(3).lpNorm<Eigen::Infinity>(),
                          row.x_m.tail(3).lpNorm<Eigen::Infinity>()});
    }
    return o;
}

void set_lipschitz(const Scenario& sc, ResolvedBudget& rb) {
    const auto& cfg = sc.cfg;
    rb.budget.lipschitz.region = lipschitz_region(sc, rb.vmax);
    if (cfg.L1) {
        rb.budget.lipschitz.L1 = *cfg.L1;
        rb.budget.lipschitz.L2 = cfg.L2 ? *cfg.L2 : *cfg.L1;
    } else {
        rb.budget.lipschitz = estimate_lipschitz(*sc.filter_barrier, rb.budget.lipschitz.region,
                                                 cfg.lipschitz_samples, cfg.lipschitz_safety, cfg.seed);
        if (cfg.L2) rb.budget.lipschitz.L2 = *cfg.L2;
    }
}

ResolvedBudget resolve_impl(const Scenario& sc, SimTrace* last) {
    const auto& cfg = sc.cfg;
    ResolvedBudget rb;
    rb.budget.gamma = cfg.gamma;
    rb.budget.lambda_bar = cfg.lambda_bar ? *cfg.lambda_bar : cfg.lambda_sim.maxCoeff();
    const bool need_pilot = !cfg.theta_x_bar || !cfg.theta_r_bar || !cfg.vmax;
    if (!need_pilot) {
        rb.budget.theta_x_bar = *cfg.theta_x_bar;
        rb.budget.theta_r_bar = *cfg.theta_r_bar;
        rb.vmax = *cfg.vmax;
        set_lipschitz(sc, rb);
        rb.budget.validate();
        rb.provenance = "explicit";
        return rb;
    }

    // Pilot without a filter. The budget only feeds diagnostics there.
    Scenario pilot = sc;
    pilot.cfg.filter = FilterKind::None;
    ResolvedBudget prov = rb;
    prov.budget.theta_x_bar = prov.budget.theta_r_bar = 1.0;
    prov.vmax = cfg.vmax ? *cfg.vmax : 10.0;
    set_lipschitz(sc, prov);
    SimTrace ptr = simulate(pilot, prov);
    Observed seen = observe(ptr);

    int round = 0;
    for (;;) {
        ++round;
        rb.budget.theta_x_bar = cfg.theta_x_bar ? *cfg.theta_x_bar : cfg.headroom * seen.sup_x;
        rb.budget.theta_r_bar = cfg.theta_r_bar ? *cfg.theta_r_bar : cfg.headroom * seen.sup_r;
        rb.vmax = cfg.vmax ? *cfg.vmax : cfg.headroom * seen.vel;
        rb.budget.theta_x_bar = std::max(rb.budget.theta_x_bar, 1e-6);
        rb.budget.theta_r_bar = std::max(rb.budget.theta_r_bar, 1e-6);
        rb.vmax = std::max(rb.vmax, 1e-3);
        set_lipschitz(sc, rb);
        rb.budget.validate();
        if (cfg.filter == FilterKind::None) {
            if (last) *last = ptr;
            break;
        }
        SimTrace tr = simulate(sc, rb);
        Observed o = observe(tr);
        bool ok = o.sup_x <= rb.budget.theta_x_bar && o.sup_r <= rb.budget.theta_r_bar &&
                  o.vel <= rb.vmax;
        if (ok || round >= 4 || tr.aborted) {
            if (last) *last = std::move(tr);
            break;
        }
        seen.sup_x = std::max(seen.sup_x, o.sup_x);
        seen.sup_r = std::max(seen.sup_r, o.sup_r);
        seen.vel = std::max(seen.vel, o.vel);
    }
    rb.provenance = "auto(" + std::to_string(round) + ")";
    if (last) last->budget = rb;
    return rb;
}

}  // namespace

ResolvedBudget resolve_budget(const Scenario& sc) {
    return resolve_impl(sc, nullptr);
}

SimTrace simulate(const Scenario& sc, const ResolvedBudget& rb) {
    const auto& cfg = sc.cfg;
    const int n = 6, m = 3, p = 3;
    const Mat& B_p = sc.plant.B_p;
    const UncertaintyBudget& ub = rb.budget;
    const Box region = lipschitz_region(sc, rb.vmax);
    const double lam_norm = spectral_norm(sc.plant.Lambda);
    const bool freeze = cfg.filter == FilterKind::PlantQP && cfg.freeze_adaptation_under_plant_qp;
    const int N = cfg.steps();
    const double dt = cfg.dt;
    const BarrierFunction& fb = *sc.filter_barrier;
    SocpSolver solver(cfg.socp);

    SimTrace tr;
    tr.filter = cfg.filter;
    tr.budget = rb;
    tr.goal = sc.goal;
    tr.rows.reserve(N + 1);

    const int ox = 2 * n, orr = 2 * n + m * n, dim = 2 * n + m * n + m * p;
    Vec X(dim);
    X.head(n) = sc.x_p0;
    X.segment(n, n) = sc.x_m0;
    X.segment(ox, m * n) = Eigen::Map<const Vec>(sc.init.theta_x.data(), m * n);
    X.segment(orr, m * p) = Eigen::Map<const Vec>(sc.init.theta_r.data(), m * p);

    auto state_of = [&](const Vec& S) {
        AdaptiveState st;
        st.theta_x = Eigen::Map<const Mat>(S.data() + ox, m, n);
        st.theta_r = Eigen::Map<const Mat>(S.data() + orr, m, p);
        return st;
    };
    const Vec zero3 = Vec::Zero(3);

    for (int k = 0; k <= N; ++k) {
        const double t = k * dt;
        Vec xp = X.head(n), xm = X.segment(n, n);
        AdaptiveState st = state_of(X);

        TraceRow row;
        row.t = t;
        row.r_star = nominal_reference(zero3, cfg.k_goal, cfg.r_max, xm.head(3));
        SafetyConstraint con = assemble_robust_constraint(fb, sc.ref, B_p, ub, xm, xp);
        row.delta = con.delta;
        row.beta = con.beta;
        row.authority = check_authority(con, cfg.authority_d);

        Vec r = row.r_star;
        std::optional<Vec> u_fixed;
        row.eta = -1.0;
        switch (cfg.filter) {
        case FilterKind::None:
            row.filter_status = "none";
            break;
        case FilterKind::ReferenceQP:
            try {
                r = reference_qp_filter(fb, sc.ref, xm, row.r_star, cfg.gamma);
                row.filter_status = (r - row.r_star).norm() > 0 ? "active" : "inactive";
            } catch (const Infeasible&) {
                r.setZero();
                row.fault = true;
                row.filter_status = "infeasible";
            }
            break;
        case FilterKind::PlantQP: {
            Vec u0 = control_input(st, xp, r);
            try {
                Vec u = plant_qp_filter(fb, sc.A_nom, B_p, xp, u0, cfg.gamma);
                row.filter_status = (u - u0).norm() > 0 ? "active" : "inactive";
                u_fixed = u;
            } catch (const Infeasible&) {
                u_fixed = u0;
                row.fault = true;
                row.filter_status = "infeasible";
            }
            break;
        }
        case FilterKind::RobustSOCP: {
            FilterResult fr = robust_socp_filter(con, row.r_star, cfg.rho, solver);
            if (fr.status == SocpStatus::Infeasible) {
                r.setZero();
                row.fault = true;
                row.filter_status = "infeasible";
            } else {
                r = fr.r;
                row.eta = fr.eta;
                row.eta_slack = fr.eta_slack;
                if (fr.status == SocpStatus::MaxIters) {
                    row.fault = true;
                    row.filter_status = "max_iters";
                } else {
                    row.filter_status = fr.linear_active ? "active" : "inactive";
                }
            }
            break;
        }
        }
        if (row.eta < 0) row.eta = r.norm();
        Vec u = u_fixed ? *u_fixed : control_input(st, xp, r);

        Vec e_x = xp - xm;
        Vec dxp = plant_dynamics(sc.plant, xp, u);
        Vec dxm = reference_dynamics(sc.ref, xm, r);
        row.e_x_norm = e_x.norm();
        row.h_plant = sc.safety->h(xp);
        row.h_ref = sc.safety->h(xm);
        row.hf_plant = fb.h(xp);
        row.hf_ref = fb.h(xm);
        row.e_h = row.hf_plant - row.hf_ref;
        row.V = lyapunov_value(e_x, st, sc.matching, sc.gains, sc.plant.Lambda);
        row.e_u_norm = output_error(st, sc.matching, xp, r).norm();
        row.theta_x_err = spectral_norm(sc.matching.theta_x - st.theta_x);
        row.theta_r_err = spectral_norm(sc.matching.theta_r - st.theta_r);

        unsigned fl = 0;
        if (row.theta_x_err > ub.theta_x_bar) fl |= kThetaXBound;
        if (row.theta_r_err > ub.theta_r_bar) fl |= kThetaRBound;
        if (lam_norm > ub.lambda_bar) fl |= kLambdaBound;
        double edh = fb.grad(xp).dot(dxp) - fb.grad(xm).dot(dxm);
        if (std::abs(edh) > ub.lipschitz.L2 * (dxp - dxm).norm() + 1e-12) fl |= kLipschitzRate;
        if (std::abs(row.e_h) > ub.lipschitz.L1 * row.e_x_norm + 1e-12) fl |= kLipschitzLevel;
        if (!inside(region, xp) || !inside(region, xm)) fl |= kOutsideRegion;
        row.budget_flags = fl;

        row.x_p = xp;
        row.x_m = xm;
        row.x_p.head(3) += sc.goal;
        row.x_m.head(3) += sc.goal;
        row.r = r;
        row.u = u;
        tr.rows.push_back(std::move(row));
        if (k == N) break;

        auto f = [&](double, const Vec& S) {
            Vec d(dim);
            Vec xs = S.head(n), xms = S.segment(n, n);
            AdaptiveState ss = state_of(S);
            Vec us = u_fixed ? *u_fixed : control_input(ss, xs, r);
            d.head(n) = plant_dynamics(sc.plant, xs, us);
            d.segment(n, n) = reference_dynamics(sc.ref, xms, r);
            if (freeze) {
                d.tail(m * n + m * p).setZero();
            } else {
                auto [dtx, dtr] = adaptation_derivatives(sc.gains, xs, r, xs - xms, B_p);
                d.segment(ox, m * n) = Eigen::Map<const Vec>(dtx.data(), m * n);
                d.segment(orr, m * p) = Eigen::Map<const Vec>(dtr.data(), m * p);
            }
            return d;
        };
        try {
            X = rk4_step(f, X, t, dt);
        } catch (const ModelError& e) {
            tr.aborted = true;
            tr.abort_reason = e.what();
            break;
        }
        if (cfg.projection_bound) {
            double b = *cfg.projection_bound;
            X.tail(m * n + m * p) = X.tail(m * n + m * p).cwiseMax(-b).cwiseMin(b);
        }
        if (!X.allFinite()) {
            tr.aborted = true;
            tr.abort_reason = "non-finite state";
            break;
        }
    }
    return tr;
}

SimTrace run_scenario(const ScenarioConfig& cfg) {
    Scenario sc = build_scenario(cfg);
    SimTrace last;
    ResolvedBudget rb = resolve_impl(sc, &last);
    if (!last.rows.empty() && last.filter == cfg.filter) return last;
    return simulate(sc, rb);
}

Summary metrics(const SimTrace& tr) {
    Summary s;
    if (tr.rows.empty()) throw ModelError("metrics: empty trace");
    const auto& rows = tr.rows;
    const int K = int(rows.size());
    s.steps = K;
    s.aborted = tr.aborted;
    s.min_h_plant = rows[0].h_plant;
    s.min_h_ref = rows[0].h_ref;
    for (int k = 0; k < K; ++k) {
        const auto& r = rows[k];
        s.min_h_plant = std::min(s.min_h_plant, r.h_plant);
        s.min_h_ref = std::min(s.min_h_ref, r.h_ref);
        s.fault_count += r.fault ? 1 : 0;
        s.budget_violation_count += (r.budget_flags & kAssumption4Mask) ? 1 : 0;
        s.assumption3_flag_count += (r.budget_flags & (kLipschitzRate | kLipschitzLevel | kOutsideRegion)) ? 1 : 0;
        s.authority_violation_count += r.authority == Authority::Assumption5Violated ? 1 : 0;
        s.eta_slack_count += r.eta_slack ? 1 : 0;
        s.max_r_norm = std::max(s.max_r_norm, r.r.norm());
        s.sup_theta_x_err = std::max(s.sup_theta_x_err, r.theta_x_err);
        s.sup_theta_r_err = std::max(s.sup_theta_r_err, r.theta_r_err);
        if (k + 1 < K) {
            double dt = rows[k + 1].t - r.t;
            s.control_effort += 0.5 * dt * (r.u.squaredNorm() + rows[k + 1].u.squaredNorm());
            s.smoothness += (rows[k + 1].r - r.r).norm();
        }
    }
    if (tr.aborted) s.fault_count += 1;
    const auto& last = rows.back();
    s.terminal_goal_distance = tr.goal.size() == 3 ? (last.x_p.head(3) - tr.goal).norm() : 0.0;
    s.terminal_tracking_error = last.e_x_norm;
    s.terminal_output_error = last.e_u_norm;
    int q = std::max(1, K / 4);
    double a = 0.0, b = 0.0;
    for (int k = 0; k < q; ++k) {
        a += rows[k].delta;
        b += rows[K - 1 - k].delta;
    }
    s.delta_mean_first_quarter = a / q;
    s.delta_mean_last_quarter = b / q;
    return s;
}

}  // namespace rsm
