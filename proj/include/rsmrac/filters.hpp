#pragma once

#include <string>

#include "rsmrac/barrier.hpp"
#include "rsmrac/solvers.hpp"

namespace rsm {

struct UncertaintyBudget {
    double theta_x_bar = 0.0;   // bound on ||theta* - theta_hat||_x (spectral)
    double theta_r_bar = 0.0;
    double lambda_bar = 0.0;    // bound on ||Lambda||
    LipschitzBudget lipschitz;
    double gamma = 1.0;         // class-K rate, alpha(h) = gamma h

    void validate() const;
};

// Robust reference-level condition, written as a^T r - c eta >= beta with
// eta >= ||r||:
//   a     = B_m^T grad h(x_m)
//   c     = L2 ||B_p|| lambda_bar theta_r_bar
//   delta = gamma L1 ||e_x|| + L2 ||A_m|| ||e_x|| + L2 ||B_p|| lambda_bar theta_x_bar ||x_p||
//   beta  = delta - grad h(x_m)^T A_m x_m - gamma h(x_m)
struct SafetyConstraint {
    Vec a;
    double c = 0.0;
    double beta = 0.0;
    double delta = 0.0;
};

SafetyConstraint assemble_robust_constraint(const BarrierFunction& b, const ReferenceModel& ref,
                                            const Mat& B_p, const UncertaintyBudget& budget,
                                            const Vec& x_m, const Vec& x_p);

// The uncertain-plant condition evaluated term by term (no (a, c, beta)):
//   grad h(x_m)^T (A_m x_m + B_m r) + gamma h(x_m)
//     - [gamma L1 ||e_x|| + L2 ||A_m|| ||e_x||
//        + L2 ||B_p|| lambda_bar (theta_x_bar ||x_p|| + theta_r_bar ||r||)]
// Nonnegative iff the robust condition holds for this r.
double robust_condition_margin(const BarrierFunction& b, const ReferenceModel& ref,
                               const Mat& B_p, const UncertaintyBudget& budget, const Vec& x_m,
                               const Vec& x_p, const Vec& r);

struct FilterResult {
    Vec r;
    double eta = 0.0;
    double v = 0.0;
    SocpStatus status = SocpStatus::Optimal;
    int iterations = 0;
    double kkt_residual = 0.0;
    bool linear_active = false;   // a^T r - c eta - beta ~ 0
    bool eta_slack = false;       // eta strictly above ||r||
    bool tracking_active = false; // r != r*
};

FilterResult robust_socp_filter(const SafetyConstraint& con, const Vec& r_star, double rho,
                                SocpSolver& solver);

// argmin ||u - u*||^2 s.t. grad h(x_p)^T (A_nom x_p + B_p u) >= -gamma h(x_p)
Vec plant_qp_filter(const BarrierFunction& b, const Mat& nominal_A, const Mat& B_p,
                    const Vec& x_p, const Vec& u_star, double gamma);

// argmin ||r - r*||^2 s.t. grad h(x_m)^T (A_m x_m + B_m r) >= -gamma h(x_m)
Vec reference_qp_filter(const BarrierFunction& b, const ReferenceModel& ref, const Vec& x_m,
                        const Vec& r_star, double gamma);

enum class Authority { Ok, Assumption5Violated, SafeWithoutInput };
const char* to_string(Authority a);

// Low-authority zone ||a|| <= c + d; inside it r = 0 must already be safe (beta <= 0).
Authority check_authority(const SafetyConstraint& con, double d);

}  // namespace rsm
