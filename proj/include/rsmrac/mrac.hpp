#pragma once

#include <utility>

#include "rsmrac/models.hpp"

namespace rsm {

struct AdaptiveState {
    Mat theta_x;   // m x n
    Mat theta_r;   // m x p

    bool finite() const { return theta_x.allFinite() && theta_r.allFinite(); }
};

struct AdaptiveGains {
    Mat gamma_x;   // n x n SPD
    Mat gamma_r;   // p x p SPD
    Mat P;         // n x n SPD, A_m^T P + P A_m = -Q
    Mat Q;

    static AdaptiveGains make(const Mat& gamma_x, const Mat& gamma_r,
                              const ReferenceModel& ref, const Mat& Q);
    static AdaptiveGains make(double gamma_x, double gamma_r,
                              const ReferenceModel& ref, const Mat& Q);
};

// u = theta_x x_p + theta_r r
Vec control_input(const AdaptiveState& s, const Vec& x_p, const Vec& r);

// d/dt theta_x = -B_p^T P e_x x_p^T Gamma_x
// d/dt theta_r = -B_p^T P e_x r^T Gamma_r
std::pair<Mat, Mat> adaptation_derivatives(const AdaptiveGains& g, const Vec& x_p,
                                           const Vec& r, const Vec& e_x, const Mat& B_p);

inline Vec tracking_error(const Vec& x_p, const Vec& x_m) { return x_p - x_m; }

// e_u = u - u*, u* from the ideal gains (simulator-side diagnostic)
Vec output_error(const AdaptiveState& s, const MatchingGains& mg, const Vec& x_p, const Vec& r);

// V = 1/2 e^T P e + 1/2 tr(Tx Gx^-1 Tx^T L) + 1/2 tr(Tr Gr^-1 Tr^T L), T = theta* - theta_hat
double lyapunov_value(const Vec& e_x, const AdaptiveState& s, const MatchingGains& mg,
                      const AdaptiveGains& g, const Mat& Lambda);

// Closed-form dV/dt along the adaptive closed loop. The cross terms cancel and
// what is left is -1/2 e^T Q e, the 1/2 coming from the 1/2 e^T P e term of V.
double lyapunov_rate(const Vec& e_x, const AdaptiveGains& g);

}  // namespace rsm
