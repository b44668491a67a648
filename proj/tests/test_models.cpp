#include <doctest.h>

#include <random>

#include "rsmrac/models.hpp"

using namespace rsm;

TEST_CASE("quadrotor plant without mismatch") {
    PlantModel p = build_quadrotor_plant(1.0, Vec::Ones(3));
    Mat A = Mat::Zero(6, 6);
    A.topRightCorner(3, 3).setIdentity();
    CHECK((p.A_p - A).norm() == 0.0);
    CHECK((p.Lambda - Mat::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("lambda is diagonal positive") {
    Vec l(3);
    l << 0.5, 0.8, 1.2;
    PlantModel p = build_quadrotor_plant(1.0, l);
    CHECK(Vec(p.Lambda.diagonal()).isApprox(l));
    CHECK_THROWS_AS(build_quadrotor_plant(1.0, Vec(-l)), ModelError);
}

TEST_CASE("full scaling 1.3 on x = e4") {
    PlantModel p = build_quadrotor_plant(1.3, Vec::Ones(3), 0.0, MismatchMode::Full);
    Vec x = Vec::Zero(6);
    x(3) = 1.0;
    Vec dx = plant_dynamics(p, x, Vec::Zero(3));
    Vec want = Vec::Zero(6);
    want(0) = 1.3;
    CHECK((dx - want).norm() < 1e-15);
}

TEST_CASE("velocity-row mismatch keeps kinematics and is matched") {
    PlantModel p = build_quadrotor_plant(1.3, Vec::Ones(3), 0.5, MismatchMode::VelocityRows);
    Vec x = Vec::Zero(6);
    x(3) = 1.0;
    Vec dx = plant_dynamics(p, x, Vec::Zero(3));
    CHECK(dx(0) == doctest::Approx(1.0));
    CHECK(dx(3) == doctest::Approx(-0.65));
    ReferenceModel ref = build_quadrotor_reference(1.0, 2.0);
    MatchingGains g = solve_matching_gains(p, ref, 1e-10);
    CHECK(g.residual < 1e-10);
}

TEST_CASE("rank deficient B is rejected") {
    Mat B = Mat::Zero(6, 3);
    B(3, 0) = 1.0;
    B(4, 1) = 1.0;
    CHECK_THROWS_AS(PlantModel::make(Mat::Zero(6, 6), B, Vec::Ones(3)), ModelError);
}

TEST_CASE("matching gains") {
    SUBCASE("zero defect") {
        Mat A = -Mat::Identity(2, 2);
        PlantModel p = PlantModel::make(A, Mat::Identity(2, 2), Vec::Ones(2));
        ReferenceModel r = ReferenceModel::make(A, Mat::Identity(2, 2));
        MatchingGains g = solve_matching_gains(p, r, 1e-12);
        CHECK(g.theta_x.norm() < 1e-14);
        CHECK((g.theta_r - Mat::Identity(2, 2)).norm() < 1e-14);
    }
    SUBCASE("quadrotor kp = kd = 4") {
        PlantModel p = build_quadrotor_plant(1.0, Vec::Ones(3));
        ReferenceModel r = build_quadrotor_reference(4.0, 4.0);
        MatchingGains g = solve_matching_gains(p, r, 1e-12);
        Mat want(3, 6);
        want << -4 * Mat::Identity(3, 3), -4 * Mat::Identity(3, 3);
        CHECK((g.theta_x - want).norm() < 1e-12);
        CHECK((p.A_p + p.B_p * p.Lambda * g.theta_x - r.A_m).norm() < 1e-12);
    }
    SUBCASE("scaled lambda") {
        Vec l(3);
        l << 0.5, 0.8, 1.2;
        PlantModel p1 = build_quadrotor_plant(1.0, Vec::Ones(3));
        PlantModel pl = build_quadrotor_plant(1.0, l);
        ReferenceModel r = build_quadrotor_reference(4.0, 4.0);
        MatchingGains g1 = solve_matching_gains(p1, r, 1e-12);
        MatchingGains gl = solve_matching_gains(pl, r, 1e-12);
        Mat want = l.cwiseInverse().asDiagonal() * g1.theta_r;
        CHECK((gl.theta_r - want).norm() < 1e-10);
        CHECK(gl.residual < 1e-10);
    }
    SUBCASE("unmatched drift throws") {
        Mat A = Mat::Zero(6, 6);
        A(0, 1) = 1.0;   // position coupling outside range(B)
        PlantModel p = PlantModel::make(A, quadrotor_B(), Vec::Ones(3));
        CHECK_THROWS_AS(solve_matching_gains(p, build_quadrotor_reference(1, 2), 1e-8),
                        MatchingInfeasible);
    }
}

TEST_CASE("plant and reference dynamics") {
    PlantModel p = PlantModel::make(Mat::Identity(2, 2), Mat::Identity(2, 2), Vec::Ones(2));
    CHECK(plant_dynamics(p, Vec::Zero(2), Vec::Zero(2)).norm() == 0.0);
    Vec x(2), u(2);
    x << 1, 2;
    u << 3, 4;
    Vec dx = plant_dynamics(p, x, u);
    CHECK(dx(0) == 4.0);
    CHECK(dx(1) == 6.0);

    PlantModel q = build_quadrotor_plant(1.3, Vec::Ones(3), 0.5, MismatchMode::VelocityRows);
    Vec e1 = Vec::Zero(6);
    e1(0) = 1.0;
    CHECK(plant_dynamics(q, e1, Vec::Zero(3)).norm() == 0.0);

    ReferenceModel r = ReferenceModel::make(-Mat::Identity(2, 2), Mat::Identity(2, 2));
    CHECK(reference_dynamics(r, Vec::Ones(2), Vec::Ones(2)).norm() == 0.0);
    CHECK_THROWS_AS(ReferenceModel::make(Mat::Identity(2, 2), Mat::Identity(2, 2)), ModelError);
}

TEST_CASE("lyapunov solver") {
    Mat P = solve_lyapunov(-Mat::Identity(3, 3), 2.0 * Mat::Identity(3, 3));
    CHECK((P - Mat::Identity(3, 3)).norm() < 1e-12);
    Mat a(1, 1), q(1, 1);
    a << -2.0;
    q << 4.0;
    CHECK(solve_lyapunov(a, q)(0, 0) == doctest::Approx(1.0));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    Mat A(6, 6);
    for (int i = 0; i < 36; ++i) A.data()[i] = N(rng);
    Eigen::ComplexEigenSolver<Mat> es(A);
    double shift = es.eigenvalues().real().maxCoeff() + 0.5;
    A -= shift * Mat::Identity(6, 6);
    Mat Q = Mat::Identity(6, 6);
    Mat P6 = solve_lyapunov(A, Q);
    CHECK((A.transpose() * P6 + P6 * A + Q).norm() < 1e-9);
    CHECK(Eigen::SelfAdjointEigenSolver<Mat>(P6).eigenvalues().minCoeff() > 0);
}
