#include <doctest.h>

#include <random>

#include "rsmrac/filters.hpp"

using namespace rsm;

namespace {

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

UncertaintyBudget unit_budget() {
    UncertaintyBudget u;
    u.theta_x_bar = 0.2;
    u.theta_r_bar = 0.05;
    u.lambda_bar = 1.1;
    u.lipschitz.L1 = 3.0;
    u.lipschitz.L2 = 3.0;
    u.gamma = 2.0;
    return u;
}

}  // namespace

TEST_CASE("zero mismatch limit gives the nominal offset") {
    ReferenceModel ref = build_quadrotor_reference(1.0, 2.0);
    SphereBarrier s(v3(5, 5, 2.5), 2.0);
    UncertaintyBudget u = unit_budget();
    Vec x0 = Vec::Zero(6);
    SafetyConstraint con = assemble_robust_constraint(s, ref, quadrotor_B(), u, x0, x0);
    CHECK(con.delta == 0.0);
    CHECK(con.beta == doctest::Approx(-(s.grad(x0).dot(ref.A_m * x0) + u.gamma * s.h(x0))));

    // e_x = 0 with x_p != 0 leaves only the theta_x term
    Vec xm(6);
    xm << 1, 2, 0.5, 0.3, -0.2, 0.1;
    con = assemble_robust_constraint(s, ref, quadrotor_B(), u, xm, xm);
    CHECK(con.delta == doctest::Approx(u.lipschitz.L2 * u.lambda_bar * u.theta_x_bar * xm.norm()));
}

TEST_CASE("delta arithmetic") {
    // 2x2 system with ||A_m|| = 2, ||B_p|| = 1, ||e_x|| = 1, ||x_p|| = 3
    ReferenceModel ref = ReferenceModel::make(-2.0 * Mat::Identity(2, 2), Mat::Identity(2, 2));
    struct Lin : BarrierFunction {
        double h(const Vec& x) const override { return x(0); }
        Vec grad(const Vec& x) const override { return Vec::Unit(x.size(), 0); }
        std::string name() const override { return "lin"; }
    } b;
    UncertaintyBudget u;
    u.theta_x_bar = 1.0;
    u.theta_r_bar = 1.0;
    u.lambda_bar = 1.0;
    u.lipschitz.L1 = u.lipschitz.L2 = 1.0;
    u.gamma = 1.0;
    Vec xp(2), xm(2);
    xp << 3, 0;
    xm << 3, 1;
    SafetyConstraint con = assemble_robust_constraint(b, ref, Mat::Identity(2, 2), u, xm, xp);
    CHECK(con.delta == doctest::Approx(6.0));
}

TEST_CASE("constraint sufficiency by substitution") {
    ReferenceModel ref = build_quadrotor_reference(1.0, 2.0);
    BrakingBarrier b(v3(5, 5, 2.5), 2.0, 6.0);
    UncertaintyBudget u = unit_budget();
    std::mt19937_64 rng(9);
    std::normal_distribution<double> N;
    for (int k = 0; k < 2000; ++k) {
        Vec xm(6), xp(6), r(3);
        for (int i = 0; i < 6; ++i) xm[i] = 3 * N(rng), xp[i] = xm[i] + 0.3 * N(rng);
        for (int i = 0; i < 3; ++i) r[i] = 2 * N(rng);
        if (!b.in_domain(xm)) continue;
        SafetyConstraint con = assemble_robust_constraint(b, ref, quadrotor_B(), u, xm, xp);
        double lin = con.a.dot(r) - con.c * r.norm() - con.beta;
        double direct = robust_condition_margin(b, ref, quadrotor_B(), u, xm, xp, r);
        CHECK(con.delta >= 0.0);
        CHECK(std::abs(lin - direct) <= 1e-10 * (1.0 + std::abs(con.beta) + std::abs(direct)));
    }
}

TEST_CASE("robust filter") {
    SocpSolver solver;
    SUBCASE("safe at the origin") {
        SafetyConstraint con{v3(1, 0, 0), 0.3, -1.0, 0.0};
        FilterResult f = robust_socp_filter(con, Vec::Zero(3), 0.1, solver);
        CHECK(f.r.norm() < 1e-6);
        CHECK(f.eta < 1e-6);
        CHECK(f.v < 1e-6);
    }
    SUBCASE("active constraint meets the boundary") {
        SafetyConstraint con{v3(1, 0, 0), 0.3, 2.0, 0.0};
        FilterResult f = robust_socp_filter(con, v3(0, 1, 0), 0.1, solver);
        CHECK(f.status == SocpStatus::Optimal);
        CHECK(f.linear_active);
        CHECK(con.a.dot(f.r) - con.c * f.r.norm() >= con.beta - 1e-6);
    }
}

TEST_CASE("plant and reference QP filters") {
    ReferenceModel ref = build_quadrotor_reference(1.0, 2.0);
    SphereBarrier s(Vec::Zero(3), 2.0);
    Vec x(6);
    x << 10, 0, 0, 1, 0, 0;   // far away, moving outward
    Vec rs = v3(0.3, -0.2, 0.1);
    CHECK((reference_qp_filter(s, ref, x, rs, 1.0) - rs).norm() == 0.0);
    CHECK((plant_qp_filter(s, quadrotor_nominal_A(), quadrotor_B(), x, rs, 1.0) - rs).norm() == 0.0);

    // on the boundary the active constraint gives h_dot = -gamma h = 0
    BrakingBarrier b(Vec::Zero(3), 2.0, 6.0);
    Vec xb(6);
    xb << 3, 0, 0, -6, 0, 0;   // h = -6 + 6 = 0
    CHECK(b.h(xb) == doctest::Approx(0.0));
    Vec r = reference_qp_filter(b, ref, xb, v3(-2, 0, 0), 10.0);
    CHECK(reference_h_dot(b, ref, xb, r) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("robust rhs exceeds the nominal one by delta") {
    ReferenceModel ref = build_quadrotor_reference(1.0, 2.0);
    BrakingBarrier b(v3(5, 5, 2.5), 2.0, 6.0);
    UncertaintyBudget u = unit_budget();
    Vec xm(6), xp(6);
    xm << 1, 1, 1, 1, 1, 0;
    xp << 1.1, 0.9, 1, 1.2, 0.8, 0.1;
    SafetyConstraint con = assemble_robust_constraint(b, ref, quadrotor_B(), u, xm, xp);
    double nominal = -(b.grad(xm).dot(ref.A_m * xm) + u.gamma * b.h(xm));
    CHECK(con.delta > 0);
    CHECK(con.beta - nominal == doctest::Approx(con.delta));
}

TEST_CASE("authority verdicts") {
    CHECK(check_authority({v3(1, 0, 0), 0.2, 5.0, 0.0}, 0.05) == Authority::Ok);
    CHECK(check_authority({Vec::Zero(3), 0.2, 1.0, 0.0}, 0.05) == Authority::Assumption5Violated);
    CHECK(check_authority({Vec::Zero(3), 0.2, -1.0, 0.0}, 0.05) == Authority::SafeWithoutInput);
    CHECK(std::string(to_string(Authority::Ok)) == "authority_ok");
}
