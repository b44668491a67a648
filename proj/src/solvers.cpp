#include "rsmrac/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace rsm {

Vec qp_single_constraint(const Vec& u_star, const Vec& a, double b_lower) {
    if (u_star.size() != a.size()) throw ModelError("qp: dimension mismatch");
    double au = a.dot(u_star);
    if (au >= b_lower) return u_star;
    double aa = a.squaredNorm();
    if (aa == 0.0) throw Infeasible("qp: zero constraint gradient with violated constraint");
    return u_star + a * ((b_lower - au) / aa);
}

void SocpProblem::validate() const {
    if (!(rho > 0)) throw ModelError("socp: rho must be positive");
    if (!(c >= 0)) throw ModelError("socp: c must be nonnegative");
    if (a.size() != r_star.size() || r_star.size() == 0) throw ModelError("socp: dimension mismatch");
    if (!r_star.allFinite() || !a.allFinite() || !std::isfinite(c) || !std::isfinite(beta))
        throw ModelError("socp: non-finite data");
}

const char* to_string(SocpStatus s) {
    switch (s) {
    case SocpStatus::Optimal: return "optimal";
    case SocpStatus::Infeasible: return "infeasible";
    case SocpStatus::MaxIters: return "max_iters";
    }
    return "?";
}

double KktReport::max() const {
    return std::max({stationarity, primal, dual, complementarity});
}

double socp_objective(const SocpProblem& prob, const Vec&, double eta, double v) {
    return v + prob.rho * eta;
}

namespace {

// Conic data for x = (r, eta, v):
//   s = h - G x in  Q^{p+1} x Q^{p+1} x R_+
//   cone 1: (v, r - r*), cone 2: (eta, r), linear: a^T r - c eta - beta
void build(const SocpProblem& pr, Mat& G, Vec& h, Vec& q) {
    const int p = pr.p(), N = p + 2, k = p + 1, M = 2 * k + 1;
    G = Mat::Zero(M, N);
    h = Vec::Zero(M);
    q = Vec::Zero(N);
    q(p) = pr.rho;
    q(p + 1) = 1.0;
    G(0, p + 1) = -1.0;
    G.block(1, 0, p, p) = -Mat::Identity(p, p);
    h.segment(1, p) = -pr.r_star;
    G(k, p) = -1.0;
    G.block(k + 1, 0, p, p) = -Mat::Identity(p, p);
    G.block(2 * k, 0, 1, p) = -pr.a.transpose();
    G(2 * k, p) = pr.c;
    h(2 * k) = -pr.beta;
}

struct Cones {
    int k;   // SOC dimension
    int M;
    int soc(int i) const { return i * k; }   // offset of SOC i (0 or 1)
    int lin() const { return 2 * k; }
};

double soc_resid(const Vec& x, int off, int k) {
    return x(off) - x.segment(off + 1, k - 1).norm();
}

// x o y
Vec jprod(const Cones& C, const Vec& x, const Vec& y) {
    Vec out(C.M);
    for (int i = 0; i < 2; ++i) {
        int o = C.soc(i), k = C.k;
        out(o) = x.segment(o, k).dot(y.segment(o, k));
        out.segment(o + 1, k - 1) = x(o) * y.segment(o + 1, k - 1) + y(o) * x.segment(o + 1, k - 1);
    }
    out(C.lin()) = x(C.lin()) * y(C.lin());
    return out;
}

// solve lam o u = d for u
Vec jdiv(const Cones& C, const Vec& lam, const Vec& d) {
    Vec u(C.M);
    for (int i = 0; i < 2; ++i) {
        int o = C.soc(i), k = C.k;
        double l0 = lam(o);
        auto l1 = lam.segment(o + 1, k - 1);
        double det = l0 * l0 - l1.squaredNorm();
        double u0 = (l0 * d(o) - l1.dot(d.segment(o + 1, k - 1))) / det;
        u(o) = u0;
        u.segment(o + 1, k - 1) = (d.segment(o + 1, k - 1) - u0 * l1) / l0;
    }
    u(C.lin()) = d(C.lin()) / lam(C.lin());
    return u;
}

Vec identity_e(const Cones& C) {
    Vec e = Vec::Zero(C.M);
    e(C.soc(0)) = 1.0;
    e(C.soc(1)) = 1.0;
    e(C.lin()) = 1.0;
    return e;
}

// largest alpha with x + alpha d in the cone (may be +inf)
double max_step(const Cones& C, const Vec& x, const Vec& d) {
    double amax = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i) {
        int o = C.soc(i), k = C.k;
        double x0 = x(o), d0 = d(o);
        auto x1 = x.segment(o + 1, k - 1);
        auto d1 = d.segment(o + 1, k - 1);
        double A = d0 * d0 - d1.squaredNorm();
        double B = 2.0 * (x0 * d0 - x1.dot(d1));
        double Cc = x0 * x0 - x1.squaredNorm();
        double root = std::numeric_limits<double>::infinity();
        if (std::abs(A) < 1e-300) {
            if (B < 0) root = -Cc / B;
        } else {
            double disc = B * B - 4.0 * A * Cc;
            if (disc >= 0) {
                double sq = std::sqrt(disc);
                double qq = -0.5 * (B + (B >= 0 ? sq : -sq));
                double r1 = qq / A, r2 = (qq != 0.0) ? Cc / qq : std::numeric_limits<double>::infinity();
                for (double r : {r1, r2})
                    if (r > 0) root = std::min(root, r);
            }
        }
        if (d0 < 0) root = std::min(root, -x0 / d0);
        amax = std::min(amax, root);
    }
    double dl = d(C.lin());
    if (dl < 0) amax = std::min(amax, -x(C.lin()) / dl);
    return amax;
}

// Nesterov-Todd scaling, W z = W^{-1} s = lambda, W symmetric block diagonal
void nt_scaling(const Cones& C, const Vec& s, const Vec& z, Mat& W, Mat& Winv) {
    W.setZero(C.M, C.M);
    Winv.setZero(C.M, C.M);
    for (int i = 0; i < 2; ++i) {
        int o = C.soc(i), k = C.k;
        Vec sk = s.segment(o, k), zk = z.segment(o, k);
        double sn = std::sqrt(std::max(sk(0) * sk(0) - sk.tail(k - 1).squaredNorm(), 1e-300));
        double zn = std::sqrt(std::max(zk(0) * zk(0) - zk.tail(k - 1).squaredNorm(), 1e-300));
        Vec sb = sk / sn, zb = zk / zn;
        double g = std::sqrt(0.5 * (1.0 + zb.dot(sb)));
        Vec w(k);
        w(0) = (sb(0) + zb(0)) / (2.0 * g);
        w.tail(k - 1) = (sb.tail(k - 1) - zb.tail(k - 1)) / (2.0 * g);
        double eta = std::sqrt(sn / zn);
        Mat B(k, k);
        B(0, 0) = w(0);
        B.block(0, 1, 1, k - 1) = w.tail(k - 1).transpose();
        B.block(1, 0, k - 1, 1) = w.tail(k - 1);
        B.block(1, 1, k - 1, k - 1) =
            Mat::Identity(k - 1, k - 1) + w.tail(k - 1) * w.tail(k - 1).transpose() / (1.0 + w(0));
        W.block(o, o, k, k) = eta * B;
        B.block(0, 1, 1, k - 1) *= -1.0;
        B.block(1, 0, k - 1, 1) *= -1.0;
        Winv.block(o, o, k, k) = B / eta;
    }
    int l = C.lin();
    double wl = std::sqrt(s(l) / z(l));
    W(l, l) = wl;
    Winv(l, l) = 1.0 / wl;
}

double cone_violation(const Cones& C, const Vec& x) {
    double v = 0.0;
    for (int i = 0; i < 2; ++i) v = std::max(v, -soc_resid(x, C.soc(i), C.k));
    return std::max(v, -x(C.lin()));
}

// Minimise ||t u - r*|| + rho t over t >= 0 (u unit vector).
double ray_argmin(const Vec& u, const Vec& r_star, double rho) {
    if (rho >= 1.0) return 0.0;
    double s = u.dot(r_star);
    double w = (r_star - s * u).norm();
    double t = s - rho * w / std::sqrt(1.0 - rho * rho);
    return std::max(0.0, t);
}

SocpSolution finish(const SocpProblem& pr, const Vec& r, double eta, double v, SocpStatus st,
                    int it, const Vec& z) {
    SocpSolution sol;
    sol.r = r;
    sol.eta = eta;
    sol.v = v;
    sol.status = st;
    sol.iterations = it;
    sol.objective = socp_objective(pr, r, eta, v);
    sol.z = z;
    if (st != SocpStatus::Infeasible && z.size() > 0) sol.kkt_residual = socp_kkt(pr, sol).max();
    return sol;
}

}  // namespace

KktReport socp_kkt(const SocpProblem& pr, const SocpSolution& sol) {
    Mat G;
    Vec h, q;
    build(pr, G, h, q);
    const int p = pr.p();
    Cones C{p + 1, 2 * (p + 1) + 1};
    Vec x(p + 2);
    x << sol.r, sol.eta, sol.v;
    Vec s = h - G * x;
    KktReport k;
    k.stationarity = (G.transpose() * sol.z + q).lpNorm<Eigen::Infinity>();
    k.primal = cone_violation(C, s);
    k.dual = cone_violation(C, sol.z);
    double comp = 0.0;
    for (int i = 0; i < 2; ++i)
        comp = std::max(comp, std::abs(s.segment(C.soc(i), C.k).dot(sol.z.segment(C.soc(i), C.k))));
    comp = std::max(comp, std::abs(s(C.lin()) * sol.z(C.lin())));
    k.complementarity = comp;
    return k;
}

SocpSolution SocpSolver::solve(const SocpProblem& pr) {
    pr.validate();
    const int p = pr.p(), N = p + 2;
    const Cones C{p + 1, 2 * (p + 1) + 1};
    const double na = pr.a.norm();
    const double rs = pr.r_star.norm();

    // Analytic phase one. For ||a|| <= c, a^T r - c eta <= (||a|| - c)||r|| <= 0,
    // so the problem is feasible iff beta <= 0, and has an interior iff beta < 0.
    Vec r0;
    double eta0 = 0.0;
    if (na <= pr.c) {
        if (pr.beta > 0) return finish(pr, Vec::Zero(p), 0.0, rs, SocpStatus::Infeasible, 0, Vec());
        if (pr.beta == 0.0) {
            // no interior: r = t a/||a||, eta = t when ||a|| == c > 0, else only r = 0
            Vec z0 = Vec::Zero(C.M);
            if (na > 0 && na == pr.c) {
                Vec u = pr.a / na;
                double t = ray_argmin(u, pr.r_star, pr.rho);
                Vec r = t * u;
                return finish(pr, r, t, (r - pr.r_star).norm(), SocpStatus::Optimal, 0, z0);
            }
            if (pr.c == 0.0 && na == 0.0) {
                Vec r = pr.rho < 1.0 ? pr.r_star : Vec(Vec::Zero(p));
                return finish(pr, r, r.norm(), (r - pr.r_star).norm(), SocpStatus::Optimal, 0, z0);
            }
            return finish(pr, Vec::Zero(p), 0.0, rs, SocpStatus::Optimal, 0, z0);
        }
        r0 = Vec::Zero(p);
        eta0 = pr.c > 0 ? std::min(1.0, -pr.beta / (2.0 * pr.c)) : 1.0;
    } else {
        Vec u = pr.a / na;
        double need = pr.beta - pr.a.dot(pr.r_star) + pr.c * (rs + 1.0);
        double t = std::max(0.0, need / (na - pr.c)) + 1.0;
        r0 = pr.r_star + t * u;
        eta0 = r0.norm() + 1.0;
    }

    build(pr, G_, h_, q_);
    Vec x(N);
    x << r0, eta0, (r0 - pr.r_star).norm() + 1.0;
    Vec s = h_ - G_ * x;
    Vec z = identity_e(C);
    const Vec e = identity_e(C);
    const double nu = 3.0;
    Mat W, Winv;

    const double qn = std::max(1.0, q_.lpNorm<Eigen::Infinity>());
    const double hn = std::max(1.0, h_.lpNorm<Eigen::Infinity>());

    // Full KKT system [[0, G^T], [G, -W^2]] (dx, dz) = (bx, rhs); better
    // conditioned than the normal equations once W^2 spreads over many decades.
    Eigen::PartialPivLU<Mat> kkt;
    Mat K = Mat::Zero(N + C.M, N + C.M);
    auto newton = [&](const Vec& lam, const Vec& bx, const Vec& bz, const Vec& ds, Vec& dx, Vec& dz,
                      Vec& dsv) {
        // W dz + W^{-1} ds = lam \ ds_rhs,  G dx + ds = bz,  G^T dz = bx
        Vec rhs = bz - W * jdiv(C, lam, ds);
        Vec b(N + C.M);
        b << bx, rhs;
        Vec sol = kkt.solve(b);
        for (int ref = 0; ref < 2; ++ref) sol += kkt.solve(b - K * sol);
        dx = sol.head(N);
        dz = sol.tail(C.M);
        dsv = bz - G_ * dx;
    };

    int it = 0;
    SocpStatus status = SocpStatus::MaxIters;
    for (; it <= opts_.max_iters; ++it) {
        Vec rx = G_.transpose() * z + q_;
        Vec rz = G_ * x + s - h_;
        double gap = s.dot(z);
        double pcost = q_.dot(x);
        if (rx.lpNorm<Eigen::Infinity>() <= opts_.tol * qn &&
            rz.lpNorm<Eigen::Infinity>() <= opts_.tol * hn &&
            gap <= opts_.tol * std::max(1.0, std::abs(pcost))) {
            status = SocpStatus::Optimal;
            break;
        }
        if (it == opts_.max_iters) break;
        double mu = gap / nu;

        nt_scaling(C, s, z, W, Winv);
        Vec lam = W * z;
        K.topRightCorner(N, C.M) = G_.transpose();
        K.bottomLeftCorner(C.M, N) = G_;
        K.bottomRightCorner(C.M, C.M) = -W * W;
        kkt.compute(K);

        Vec dxa, dza, dsa;
        newton(lam, -rx, -rz, -jprod(C, lam, lam), dxa, dza, dsa);
        double aa = std::min(1.0, std::min(max_step(C, s, dsa), max_step(C, z, dza)));
        double sig = std::pow(std::max(0.0, (s + aa * dsa).dot(z + aa * dza)) / gap, 3.0);
        sig = std::clamp(sig, 0.0, 1.0);

        Vec ds = -jprod(C, lam, lam) - jprod(C, Winv * dsa, W * dza) + sig * mu * e;
        Vec dx, dz, dsv;
        newton(lam, -rx, -rz, ds, dx, dz, dsv);
        double amax = std::min(max_step(C, s, dsv), max_step(C, z, dz));
        double alpha = std::min(1.0, 0.99 * amax);
        x += alpha * dx;
        s += alpha * dsv;
        z += alpha * dz;
        if (!x.allFinite() || !z.allFinite()) break;
    }
    Vec r = x.head(p);
    return finish(pr, r, x(p), x(p + 1), status, it, z);
}

SocpSolution socp_solve(const SocpProblem& prob, const SocpOptions& opts) {
    SocpSolver solver(opts);
    return solver.solve(prob);
}

SocpSolution socp_oracle(const SocpProblem& pr, int grid) {
    pr.validate();
    const int p = pr.p();
    const double na = pr.a.norm(), rs = pr.r_star.norm();

    auto objective = [&](const Vec& r) { return (r - pr.r_star).norm() + pr.rho * r.norm(); };
    // boundary points are constructed exactly, so allow roundoff
    const double ftol = 1e-12 * (1.0 + std::abs(pr.beta));
    auto feasible = [&](const Vec& r) { return pr.a.dot(r) - pr.c * r.norm() >= pr.beta - ftol; };
    auto done = [&](const Vec& r, SocpStatus st) {
        SocpSolution sol;
        sol.r = r;
        sol.eta = r.norm();
        sol.v = (r - pr.r_star).norm();
        sol.status = st;
        sol.objective = sol.v + pr.rho * sol.eta;
        return sol;
    };

    // a feasible anchor point
    Vec rf;
    if (pr.beta <= 0) {
        rf = Vec::Zero(p);
    } else if (na > pr.c) {
        rf = pr.a / na * (pr.beta / (na - pr.c));
    } else {
        return done(Vec::Zero(p), SocpStatus::Infeasible);
    }

    // orthonormal basis of span{r*, a}
    std::vector<Vec> basis;
    if (rs > 0) basis.push_back(pr.r_star / rs);
    if (na > 0) {
        Vec w = pr.a;
        for (const auto& b : basis) w -= b.dot(w) * b;
        if (w.norm() > 1e-12 * std::max(1.0, na)) basis.push_back(w / w.norm());
    }
    if (basis.empty()) return done(Vec::Zero(p), SocpStatus::Optimal);

    const int d = int(basis.size());
    auto embed = [&](double a1, double a2) {
        Vec r = a1 * basis[0];
        if (d > 1) r += a2 * basis[1];
        return r;
    };

    Vec best = rf;
    double fbest = objective(rf);
    auto consider = [&](const Vec& r) {
        if (!r.allFinite() || !feasible(r)) return;
        double f = objective(r);
        if (f < fbest) {
            fbest = f;
            best = r;
        }
    };
    // The objective is minimised without constraints at r* (rho < 1) or at 0.
    // If that point is infeasible the optimum sits on a^T r - c||r|| = beta.
    consider(Vec::Zero(p));
    consider(pr.rho < 1.0 ? pr.r_star : Vec(Vec::Zero(p)));

    // Boundary in polar form: r = t u(th), t (a^T u - c) = beta.
    const double a1 = pr.a.dot(basis[0]), a2 = d > 1 ? pr.a.dot(basis[1]) : 0.0;
    auto on_boundary = [&](double th, Vec& r) {
        double u1 = std::cos(th), u2 = d > 1 ? std::sin(th) : 0.0;
        double den = a1 * u1 + a2 * u2 - pr.c;
        if (pr.beta == 0.0) {
            if (std::abs(den) > 1e-12) return false;
            Vec u = embed(u1, u2);
            r = ray_argmin(u, pr.r_star, pr.rho) * u;
            return true;
        }
        double t = pr.beta / den;
        if (!(t >= 0) || !std::isfinite(t)) return false;
        r = t * embed(u1, u2);
        return true;
    };
    auto scan = [&](double th0, double th1, int n) {
        double best_th = std::numeric_limits<double>::quiet_NaN(), fb = fbest;
        Vec r;
        for (int i = 0; i < n; ++i) {
            double th = th0 + (th1 - th0) * i / (n - 1);
            if (!on_boundary(th, r)) continue;
            consider(r);
            if (fbest < fb) {
                fb = fbest;
                best_th = th;
            }
        }
        return best_th;
    };
    if (d == 1) {
        scan(0.0, std::numbers::pi, 2);
    } else if (pr.beta == 0.0) {
        double phi = std::atan2(a2, a1), w = std::acos(std::clamp(pr.c / na, -1.0, 1.0));
        Vec r;
        for (double th : {phi + w, phi - w})
            if (on_boundary(th, r)) consider(r);
    } else {
        // dense sweep of the angle, then zoom on the incumbent
        const int n = std::max(grid, 3) * 100 + 1;
        double th = scan(-std::numbers::pi, std::numbers::pi, n);
        double half = 3.0 * 2.0 * std::numbers::pi / (n - 1);
        while (std::isfinite(th) && half > 1e-13) {
            double t2 = scan(th - half, th + half, grid);
            if (std::isfinite(t2)) th = t2;
            half *= 6.0 / (grid - 1);
        }
    }
    return done(best, SocpStatus::Optimal);
}

}  // namespace rsm
