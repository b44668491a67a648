#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rsm {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MatchingInfeasible : ModelError {
    using ModelError::ModelError;
};

struct PlantModel {
    Mat A_p;      // n x n
    Mat B_p;      // n x m
    Mat Lambda;   // m x m diagonal

    // validates rank(B_p) = m and Lambda diagonal positive
    static PlantModel make(const Mat& A_p, const Mat& B_p, const Vec& lambda_diag);

    int n() const { return int(A_p.rows()); }
    int m() const { return int(B_p.cols()); }
};

struct ReferenceModel {
    Mat A_m;   // n x n, Hurwitz
    Mat B_m;   // n x p

    static ReferenceModel make(const Mat& A_m, const Mat& B_m);

    int n() const { return int(A_m.rows()); }
    int p() const { return int(B_m.cols()); }
};

struct MatchingGains {
    Mat theta_x;   // m x n
    Mat theta_r;   // m x p
    double residual = 0.0;     // sqrt(res_x^2 + res_r^2)
    double residual_x = 0.0;   // ||A_p + B_p Lambda theta_x - A_m||_F
    double residual_r = 0.0;   // ||B_p Lambda theta_r - B_m||_F
};

// How the drift mismatch enters the simulated plant.
//   Full:         A_p = Delta * A_nom (every row scaled, incl. dp/dt = v)
//   VelocityRows: A_p = blockdiag(I, Delta) * A_nom (matched: only the
//                 acceleration rows, which lie in range(B_p), are scaled)
enum class MismatchMode { Full, VelocityRows };

// Nominal translational model: positions integrate velocities, inputs are
// accelerations, optional linear drag on the velocity rows.
Mat quadrotor_nominal_A(double drag = 0.0);
Mat quadrotor_B();

PlantModel build_quadrotor_plant(double delta_scale, const Vec& lambda_diag,
                                 double drag = 0.0,
                                 MismatchMode mode = MismatchMode::Full);
PlantModel build_quadrotor_plant(const Mat& delta_A, const Vec& lambda_diag,
                                 double drag = 0.0,
                                 MismatchMode mode = MismatchMode::Full);

// A_m = [[0, I], [-kp I, -kd I]], B_m = [0; I]
ReferenceModel build_quadrotor_reference(double kp, double kd);

MatchingGains solve_matching_gains(const PlantModel& plant,
                                   const ReferenceModel& ref, double tol);

Vec plant_dynamics(const PlantModel& plant, const Vec& x, const Vec& u);
Vec reference_dynamics(const ReferenceModel& ref, const Vec& x_m, const Vec& r);

// A_m^T P + P A_m = -Q via (I kron A_m^T + A_m^T kron I) vec(P) = -vec(Q)
Mat solve_lyapunov(const Mat& A_m, const Mat& Q);

bool is_hurwitz(const Mat& A);
double spectral_norm(const Mat& A);

}  // namespace rsm
