#pragma once

#include <stdexcept>
#include <string>

#include "rsmrac/models.hpp"

namespace rsm {

struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// argmin ||u - u*||^2 s.t. a^T u >= b (closed form halfspace projection)
Vec qp_single_constraint(const Vec& u_star, const Vec& a, double b_lower);

// min v + rho eta  s.t.  ||r - r*|| <= v,  ||r|| <= eta,  a^T r - c eta >= beta
struct SocpProblem {
    Vec r_star;
    double rho = 0.1;
    Vec a;
    double c = 0.0;
    double beta = 0.0;

    int p() const { return int(r_star.size()); }
    void validate() const;
};

enum class SocpStatus { Optimal, Infeasible, MaxIters };
const char* to_string(SocpStatus s);

struct SocpSolution {
    Vec r;
    double eta = 0.0;
    double v = 0.0;
    SocpStatus status = SocpStatus::MaxIters;
    double objective = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    Vec z;   // duals: cone (v, r - r*) | cone (eta, r) | linear
};

struct SocpOptions {
    double tol = 1e-8;
    int max_iters = 100;
};

// Residuals recomputed from (r, eta, v, z), independent of solver state.
struct KktReport {
    double stationarity = 0.0;    // ||G^T z + q||_inf
    double primal = 0.0;          // cone violation of s = h - G x
    double dual = 0.0;            // cone violation of z
    double complementarity = 0.0; // max per-cone s_k^T z_k
    double max() const;
};

KktReport socp_kkt(const SocpProblem& prob, const SocpSolution& sol);
double socp_objective(const SocpProblem& prob, const Vec& r, double eta, double v);

// Primal-dual interior point with Nesterov-Todd scaling and a Mehrotra
// predictor-corrector. Feasibility is decided analytically before the
// iteration starts (see phase_one in solvers.cpp).
class SocpSolver {
public:
    explicit SocpSolver(SocpOptions opts = {}) : opts_(opts) {}
    SocpSolution solve(const SocpProblem& prob);
    const SocpOptions& options() const { return opts_; }

private:
    SocpOptions opts_;
    Mat G_, H_;
    Vec h_, q_;
};

SocpSolution socp_solve(const SocpProblem& prob, const SocpOptions& opts = {});

// Test oracle: restrict r to span{r*, a} and set eta = ||r||, v = ||r - r*||.
// Checks the unconstrained minimisers, then sweeps the boundary
// a^T r - c||r|| = beta by angle on a dense grid with zoom passes.
SocpSolution socp_oracle(const SocpProblem& prob, int grid = 201);

}  // namespace rsm
