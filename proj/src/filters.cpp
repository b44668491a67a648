#include "rsmrac/filters.hpp"

#include <cmath>

namespace rsm {

void UncertaintyBudget::validate() const {
    auto pos = [](double v, const char* key) {
        if (!(v > 0) || !std::isfinite(v)) throw ModelError(std::string(key) + " must be positive");
    };
    pos(theta_x_bar, "budget.theta_x_bar");
    pos(theta_r_bar, "budget.theta_r_bar");
    pos(lambda_bar, "budget.lambda_bar");
    pos(lipschitz.L1, "budget.L1");
    pos(lipschitz.L2, "budget.L2");
    pos(gamma, "filter.gamma");
}

namespace {

struct Terms {
    double ex_norm, xp_norm, am_norm, bp_norm;
};

Terms norms(const ReferenceModel& ref, const Mat& B_p, const Vec& x_m, const Vec& x_p) {
    return {(x_p - x_m).norm(), x_p.norm(), spectral_norm(ref.A_m), spectral_norm(B_p)};
}

}  // namespace

SafetyConstraint assemble_robust_constraint(const BarrierFunction& b, const ReferenceModel& ref,
                                            const Mat& B_p, const UncertaintyBudget& u,
                                            const Vec& x_m, const Vec& x_p) {
    const auto t = norms(ref, B_p, x_m, x_p);
    const double L1 = u.lipschitz.L1, L2 = u.lipschitz.L2;
    Vec g = b.grad(x_m);
    SafetyConstraint con;
    con.delta = u.gamma * L1 * t.ex_norm + L2 * t.am_norm * t.ex_norm +
                L2 * t.bp_norm * u.lambda_bar * u.theta_x_bar * t.xp_norm;
    con.a = ref.B_m.transpose() * g;
    con.c = L2 * t.bp_norm * u.lambda_bar * u.theta_r_bar;
    con.beta = con.delta - g.dot(ref.A_m * x_m) - u.gamma * b.h(x_m);
    return con;
}

double robust_condition_margin(const BarrierFunction& b, const ReferenceModel& ref,
                               const Mat& B_p, const UncertaintyBudget& u, const Vec& x_m,
                               const Vec& x_p, const Vec& r) {
    const auto t = norms(ref, B_p, x_m, x_p);
    const double L1 = u.lipschitz.L1, L2 = u.lipschitz.L2;
    double lhs = reference_h_dot(b, ref, x_m, r) + u.gamma * b.h(x_m);
    double worst = u.gamma * L1 * t.ex_norm + L2 * t.am_norm * t.ex_norm +
                   L2 * t.bp_norm * u.lambda_bar * (u.theta_x_bar * t.xp_norm + u.theta_r_bar * r.norm());
    return lhs - worst;
}

FilterResult robust_socp_filter(const SafetyConstraint& con, const Vec& r_star, double rho,
                                SocpSolver& solver) {
    SocpProblem prob{r_star, rho, con.a, con.c, con.beta};
    SocpSolution sol = solver.solve(prob);
    FilterResult f;
    f.status = sol.status;
    f.iterations = sol.iterations;
    f.kkt_residual = sol.kkt_residual;
    f.r = sol.r;
    f.eta = sol.eta;
    f.v = sol.v;
    if (sol.status == SocpStatus::Infeasible) return f;
    const double tol = 1e-6 * (1.0 + std::abs(con.beta));
    f.linear_active = con.a.dot(sol.r) - con.c * sol.eta - con.beta <= tol;
    f.eta_slack = sol.eta - sol.r.norm() > tol;
    f.tracking_active = (sol.r - r_star).norm() > tol;
    return f;
}

Vec plant_qp_filter(const BarrierFunction& b, const Mat& nominal_A, const Mat& B_p,
                    const Vec& x_p, const Vec& u_star, double gamma) {
    Vec g = b.grad(x_p);
    Vec a = B_p.transpose() * g;
    double lower = -gamma * b.h(x_p) - g.dot(nominal_A * x_p);
    return qp_single_constraint(u_star, a, lower);
}

Vec reference_qp_filter(const BarrierFunction& b, const ReferenceModel& ref, const Vec& x_m,
                        const Vec& r_star, double gamma) {
    Vec g = b.grad(x_m);
    Vec a = ref.B_m.transpose() * g;
    double lower = -gamma * b.h(x_m) - g.dot(ref.A_m * x_m);
    return qp_single_constraint(r_star, a, lower);
}

const char* to_string(Authority a) {
    switch (a) {
    case Authority::Ok: return "authority_ok";
    case Authority::Assumption5Violated: return "assumption5_violated";
    case Authority::SafeWithoutInput: return "safe_without_input";
    }
    return "?";
}

Authority check_authority(const SafetyConstraint& con, double d) {
    if (con.a.norm() > con.c + d) return Authority::Ok;
    return con.beta <= 0 ? Authority::SafeWithoutInput : Authority::Assumption5Violated;
}

}  // namespace rsm
