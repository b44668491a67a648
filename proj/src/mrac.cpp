#include "rsmrac/mrac.hpp"

namespace rsm {

namespace {

void require_spd(const Mat& M, const char* what) {
    if (M.rows() != M.cols() || M.rows() == 0)
        throw ModelError(std::string(what) + " must be square");
    if ((M - M.transpose()).norm() > 1e-12 * std::max(1.0, M.norm()))
        throw ModelError(std::string(what) + " must be symmetric");
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success)
        throw ModelError(std::string(what) + " must be positive definite");
}

}  // namespace

AdaptiveGains AdaptiveGains::make(const Mat& gamma_x, const Mat& gamma_r,
                                  const ReferenceModel& ref, const Mat& Q) {
    require_spd(gamma_x, "adaptation.gamma_x");
    require_spd(gamma_r, "adaptation.gamma_r");
    require_spd(Q, "adaptation.q");
    if (gamma_x.rows() != ref.n() || gamma_r.rows() != ref.p() || Q.rows() != ref.n())
        throw ModelError("adaptation: gain dimensions do not match the reference model");
    AdaptiveGains g;
    g.gamma_x = gamma_x;
    g.gamma_r = gamma_r;
    g.Q = Q;
    g.P = solve_lyapunov(ref.A_m, Q);
    return g;
}

AdaptiveGains AdaptiveGains::make(double gamma_x, double gamma_r, const ReferenceModel& ref,
                                  const Mat& Q) {
    if (!(gamma_x > 0) || !(gamma_r > 0)) throw ModelError("adaptation: gamma must be positive");
    return make(Mat(gamma_x * Mat::Identity(ref.n(), ref.n())),
                Mat(gamma_r * Mat::Identity(ref.p(), ref.p())), ref, Q);
}

Vec control_input(const AdaptiveState& s, const Vec& x_p, const Vec& r) {
    if (s.theta_x.cols() != x_p.size() || s.theta_r.cols() != r.size())
        throw ModelError("control_input: dimension mismatch");
    return s.theta_x * x_p + s.theta_r * r;
}

std::pair<Mat, Mat> adaptation_derivatives(const AdaptiveGains& g, const Vec& x_p,
                                           const Vec& r, const Vec& e_x, const Mat& B_p) {
    if (x_p.size() != g.P.rows() || e_x.size() != g.P.rows() || B_p.rows() != g.P.rows() ||
        r.size() != g.gamma_r.rows())
        throw ModelError("adaptation_derivatives: dimension mismatch");
    Vec w = B_p.transpose() * (g.P * e_x);   // m
    Mat dx = -w * (g.gamma_x * x_p).transpose();
    Mat dr = -w * (g.gamma_r * r).transpose();
    return {dx, dr};
}

Vec output_error(const AdaptiveState& s, const MatchingGains& mg, const Vec& x_p, const Vec& r) {
    return (s.theta_x - mg.theta_x) * x_p + (s.theta_r - mg.theta_r) * r;
}

double lyapunov_value(const Vec& e_x, const AdaptiveState& s, const MatchingGains& mg,
                      const AdaptiveGains& g, const Mat& Lambda) {
    Mat tx = mg.theta_x - s.theta_x;
    Mat tr = mg.theta_r - s.theta_r;
    double v = 0.5 * e_x.dot(g.P * e_x);
    v += 0.5 * (tx * g.gamma_x.llt().solve(tx.transpose()) * Lambda).trace();
    v += 0.5 * (tr * g.gamma_r.llt().solve(tr.transpose()) * Lambda).trace();
    return v;
}

double lyapunov_rate(const Vec& e_x, const AdaptiveGains& g) {
    return -0.5 * e_x.dot(g.Q * e_x);
}

}  // namespace rsm
