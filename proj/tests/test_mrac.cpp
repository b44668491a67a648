#include <doctest.h>

#include <random>

#include "rsmrac/mrac.hpp"
#include "rsmrac/sim.hpp"

using namespace rsm;

namespace {

Mat M1(double v) {
    Mat m(1, 1);
    m << v;
    return m;
}

}  // namespace

TEST_CASE("control input") {
    AdaptiveState s{Mat::Zero(2, 2), Mat::Zero(2, 2)};
    Vec x(2);
    x << 1, 2;
    CHECK(control_input(s, x, Vec::Ones(2)).norm() == 0.0);
    s.theta_x = Mat::Identity(2, 2);
    CHECK((control_input(s, x, Vec::Ones(2)) - x).norm() == 0.0);
}

TEST_CASE("ideal gains reproduce u*") {
    PlantModel p = build_quadrotor_plant(1.3, Vec::Constant(3, 0.7), 0.5, MismatchMode::VelocityRows);
    ReferenceModel ref = build_quadrotor_reference(1.0, 2.0);
    MatchingGains mg = solve_matching_gains(p, ref, 1e-10);
    AdaptiveState s{mg.theta_x, mg.theta_r};
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N;
    for (int k = 0; k < 20; ++k) {
        Vec x(6), r(3);
        for (int i = 0; i < 6; ++i) x[i] = N(rng);
        for (int i = 0; i < 3; ++i) r[i] = N(rng);
        CHECK(output_error(s, mg, x, r).norm() == 0.0);
        // ideal input makes the plant follow the reference dynamics
        Vec dp = plant_dynamics(p, x, control_input(s, x, r));
        CHECK((dp - reference_dynamics(ref, x, r)).norm() < 1e-10);
    }
}

TEST_CASE("adaptation derivatives") {
    ReferenceModel ref = build_quadrotor_reference(1.0, 2.0);
    AdaptiveGains g = AdaptiveGains::make(1.0, 1.0, ref, Mat::Identity(6, 6));
    auto [dx0, dr0] = adaptation_derivatives(g, Vec::Ones(6), Vec::Ones(3), Vec::Zero(6), quadrotor_B());
    CHECK(dx0.norm() == 0.0);
    CHECK(dr0.norm() == 0.0);

    AdaptiveGains s;
    s.gamma_x = M1(1.0);
    s.gamma_r = M1(1.0);
    s.P = M1(1.0);
    s.Q = M1(2.0);
    auto [dx, dr] = adaptation_derivatives(s, Vec::Constant(1, 2.0), Vec::Constant(1, 0.0),
                                           Vec::Constant(1, 3.0), M1(1.0));
    CHECK(dx(0, 0) == doctest::Approx(-6.0));
}

TEST_CASE("tracking error") {
    Vec a(2), b(2);
    a << 1, 0;
    b << 0, 1;
    CHECK(tracking_error(a, a).norm() == 0.0);
    CHECK(tracking_error(a, b)(1) == -1.0);
    CHECK((tracking_error(a, b) + tracking_error(b, a)).norm() == 0.0);
}

TEST_CASE("lyapunov value") {
    MatchingGains mg;
    mg.theta_x = M1(0.3);
    mg.theta_r = M1(0.7);
    AdaptiveState s{M1(0.3), M1(0.7)};
    AdaptiveGains g;
    g.gamma_x = M1(1.0);
    g.gamma_r = M1(1.0);
    g.P = M1(2.0);
    g.Q = M1(1.0);
    CHECK(lyapunov_value(Vec::Zero(1), s, mg, g, M1(1.0)) == 0.0);
    CHECK(lyapunov_value(Vec::Ones(1), s, mg, g, M1(1.0)) == doctest::Approx(1.0));
}

TEST_CASE("V is nonincreasing with the rate -1/2 e^T Q e") {
    PlantModel p = build_quadrotor_plant(1.3, Vec::Constant(3, 0.8), 0.5, MismatchMode::VelocityRows);
    ReferenceModel ref = build_quadrotor_reference(1.0, 2.0);
    MatchingGains mg = solve_matching_gains(p, ref, 1e-10);
    AdaptiveGains g = AdaptiveGains::make(1.0, 1.0, ref, Mat::Identity(6, 6));
    Vec r = Vec::Constant(3, 0.5);
    const int n = 6, m = 3;
    auto unpack = [&](const Vec& S) {
        AdaptiveState st;
        st.theta_x = Eigen::Map<const Mat>(S.data() + 2 * n, m, n);
        st.theta_r = Eigen::Map<const Mat>(S.data() + 2 * n + m * n, m, m);
        return st;
    };
    OdeRhs f = [&](double, const Vec& S) {
        Vec d(S.size());
        AdaptiveState st = unpack(S);
        Vec xp = S.head(n), xm = S.segment(n, n);
        d.head(n) = plant_dynamics(p, xp, control_input(st, xp, r));
        d.segment(n, n) = reference_dynamics(ref, xm, r);
        auto [dx, dr] = adaptation_derivatives(g, xp, r, xp - xm, p.B_p);
        d.segment(2 * n, m * n) = Eigen::Map<const Vec>(dx.data(), m * n);
        d.tail(m * m) = Eigen::Map<const Vec>(dr.data(), m * m);
        return d;
    };
    Vec S = Vec::Zero(2 * n + m * n + m * m);
    S(0) = 1.0;
    S(4) = -0.5;
    const double dt = 0.002;
    auto V = [&](const Vec& s) { return lyapunov_value(s.head(n) - s.segment(n, n), unpack(s), mg, g, p.Lambda); };
    double worst = 0.0;
    Vec prev = S;
    S = rk4_step(f, S, 0.0, dt);
    for (int k = 1; k < 2000; ++k) {
        Vec next = rk4_step(f, S, k * dt, dt);
        double fd = (V(next) - V(prev)) / (2 * dt);
        double want = lyapunov_rate(S.head(n) - S.segment(n, n), g);
        worst = std::max(worst, std::abs(fd - want));
        CHECK(V(next) <= V(S) + 1e-6 * (1 + V(S)));
        prev = S;
        S = next;
    }
    CHECK(worst < 1e-4);
}
