#include <doctest.h>

#include <random>

#include "rsmrac/barrier.hpp"

using namespace rsm;

namespace {

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

Vec state(const Vec& p, const Vec& v) {
    Vec x(6);
    x << p, v;
    return x;
}

Box cube(double half, double vmax) {
    Box b;
    b.lo = Vec(6);
    b.hi = Vec(6);
    b.lo << Vec::Constant(3, -half), Vec::Constant(3, -vmax);
    b.hi << Vec::Constant(3, half), Vec::Constant(3, vmax);
    return b;
}

}  // namespace

TEST_CASE("sphere barrier values and gradient") {
    SphereBarrier s(Vec::Zero(3), 2.0);
    CHECK(s.h(Vec::Zero(6)) == -4.0);
    CHECK(s.h(state(v3(2, 0, 0), Vec::Zero(3))) == doctest::Approx(0.0));
    Vec x = state(v3(3, 0, 0), v3(1, 1, 1));
    CHECK(s.h(x) == 5.0);
    Vec g = s.grad(x);
    CHECK((g.head(3) - v3(6, 0, 0)).norm() == 0.0);
    CHECK(g.tail(3).norm() == 0.0);
    CHECK_THROWS_WITH_AS(SphereBarrier(Vec::Zero(3), -1.0), "barrier.radius must be positive", ModelError);
}

TEST_CASE("barrier error") {
    SphereBarrier s(Vec::Zero(3), 2.0);
    Vec x = state(v3(3, 0, 0), Vec::Zero(3));
    CHECK(barrier_error(s, x, x) == 0.0);
    Vec y = state(v3(std::sqrt(7.0), 0, 0), Vec::Zero(3));   // h = 3
    CHECK(barrier_error(s, x, y) == doctest::Approx(2.0));
}

TEST_CASE("reference h dot") {
    ReferenceModel ref = build_quadrotor_reference(1.0, 2.0);
    SphereBarrier s(Vec::Zero(3), 2.0);
    // radial outward velocity 1 on the surface, r = 0: positions integrate velocity
    Vec x = state(v3(2, 0, 0), v3(1, 0, 0));
    CHECK(reference_h_dot(s, ref, x, Vec::Zero(3)) == doctest::Approx(4.0));
    // zero gradient at the centre
    CHECK(reference_h_dot(s, ref, state(Vec::Zero(3), v3(1, 2, 3)), v3(5, 5, 5)) == 0.0);
    BrakingBarrier b(v3(5, 5, 2.5), 2.0, 6.0);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> N;
    for (int k = 0; k < 20; ++k) {
        Vec xm = state(v3(N(rng), N(rng), N(rng)), v3(N(rng), N(rng), N(rng)));
        Vec r1 = v3(N(rng), N(rng), N(rng)), r2 = v3(N(rng), N(rng), N(rng));
        double lhs = reference_h_dot(b, ref, xm, r1 + r2) - reference_h_dot(b, ref, xm, r1);
        CHECK(lhs == doctest::Approx(b.grad(xm).dot(ref.B_m * r2)).epsilon(1e-9));
    }
}

TEST_CASE("braking barrier") {
    BrakingBarrier b(Vec::Zero(3), 2.0, 6.0);
    // at rest on the surface h = 0, moving inward h < 0
    CHECK(b.h(state(v3(2, 0, 0), Vec::Zero(3))) == doctest::Approx(0.0));
    CHECK(b.h(state(v3(3, 0, 0), v3(-1, 0, 0))) == doctest::Approx(5.0));
    CHECK((b.grad(state(v3(3, 0, 0), v3(0, 1, 0))).tail(3) - v3(1, 0, 0)).norm() < 1e-15);
    CHECK_FALSE(b.in_domain(state(v3(1, 0, 0), Vec::Zero(3))));
}

TEST_CASE("gradients match finite differences") {
    Box box = cube(8.0, 5.0);
    SphereBarrier s(v3(1, -1, 0.5), 2.0);
    BrakingBarrier b(v3(1, -1, 0.5), 2.0, 6.0);
    CHECK(gradient_check(s, box, 500, 1) <= 1e-5);
    CHECK(gradient_check(b, box, 500, 1) <= 1e-5);
}

TEST_CASE("lipschitz estimate for the sphere") {
    SphereBarrier s(Vec::Zero(3), 1.0);
    Box box = cube(2.0, 1.0);
    LipschitzBudget lb = estimate_lipschitz(s, box, 20000, 1.1, 0);
    double sup = 2.0 * std::sqrt(12.0);   // corner of the position box
    CHECK(lb.L1 == doctest::Approx(1.1 * sup).epsilon(0.05));
    CHECK(lb.L2 == lb.L1);
    LipschitzBudget big = estimate_lipschitz(s, cube(4.0, 1.0), 20000, 1.1, 0);
    CHECK(big.L1 / lb.L1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("constant barrier has no Lipschitz budget") {
    struct Flat : BarrierFunction {
        double h(const Vec&) const override { return 1.0; }
        Vec grad(const Vec& x) const override { return Vec::Zero(x.size()); }
        std::string name() const override { return "flat"; }
    } flat;
    CHECK_THROWS_AS(estimate_lipschitz(flat, cube(1.0, 1.0), 1000), ModelError);
}

TEST_CASE("|e_h| <= L1 |e_x| on random pairs") {
    BrakingBarrier b(v3(5, 5, 2.5), 2.0, 6.0);
    Box box;
    box.lo = Vec(6);
    box.hi = Vec(6);
    box.lo << -2, -2, -4, -4.5, -4.5, -4.5;
    box.hi << 12, 12, 9, 4.5, 4.5, 4.5;
    LipschitzBudget lb = estimate_lipschitz(b, box, 20000);
    HaltonSampler hs(6, 99);
    int checked = 0;
    for (int k = 0; k < 10000; ++k) {
        Vec x = box.lo + hs.next().cwiseProduct(box.hi - box.lo);
        Vec y = box.lo + hs.next().cwiseProduct(box.hi - box.lo);
        // straight segment must avoid the excluded core for the mean-value bound
        bool ok = true;
        for (int i = 0; i <= 20 && ok; ++i) ok = b.in_domain(x + (y - x) * (i / 20.0));
        if (!ok) continue;
        ++checked;
        CHECK(std::abs(barrier_error(b, x, y)) <= lb.L1 * (x - y).norm() + 1e-12);
    }
    CHECK(checked > 1000);
}
