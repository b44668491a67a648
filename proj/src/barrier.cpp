#include "rsmrac/barrier.hpp"

#include <cmath>
#include <iterator>
#include <random>

namespace rsm {

SphereBarrier::SphereBarrier(const Vec& center, double radius, int pos_index)
    : p_o_(center), r_o_(radius), pos_(pos_index) {
    if (!(radius > 0)) throw ModelError("barrier.radius must be positive");
    if (center.size() != 3) throw ModelError("barrier.center must have 3 entries");
}

double SphereBarrier::h(const Vec& x) const {
    Vec d = x.segment(pos_, 3) - p_o_;
    return d.squaredNorm() - r_o_ * r_o_;
}

Vec SphereBarrier::grad(const Vec& x) const {
    Vec g = Vec::Zero(x.size());
    g.segment(pos_, 3) = 2.0 * (x.segment(pos_, 3) - p_o_);
    return g;
}

BrakingBarrier::BrakingBarrier(const Vec& center, double radius, double kappa, int pos_index,
                               int vel_index)
    : p_o_(center), r_o_(radius), kappa_(kappa), pos_(pos_index), vel_(vel_index) {
    if (!(radius > 0)) throw ModelError("barrier.radius must be positive");
    if (!(kappa > 0)) throw ModelError("barrier.kappa must be positive");
    if (center.size() != 3) throw ModelError("barrier.center must have 3 entries");
}

bool BrakingBarrier::in_domain(const Vec& x) const {
    return (x.segment(pos_, 3) - p_o_).norm() >= r_o_;
}

double BrakingBarrier::h(const Vec& x) const {
    Vec d = x.segment(pos_, 3) - p_o_;
    double nd = d.norm();
    if (nd == 0.0) return -kappa_ * r_o_;
    return d.dot(x.segment(vel_, 3)) / nd + kappa_ * (nd - r_o_);
}

Vec BrakingBarrier::grad(const Vec& x) const {
    Vec g = Vec::Zero(x.size());
    Vec d = x.segment(pos_, 3) - p_o_;
    double nd = d.norm();
    if (nd == 0.0) return g;
    Vec u = d / nd;
    Vec v = x.segment(vel_, 3);
    g.segment(pos_, 3) = (v - u.dot(v) * u) / nd + kappa_ * u;
    g.segment(vel_, 3) = u;
    return g;
}

bool Box::empty() const {
    if (lo.size() == 0 || lo.size() != hi.size()) return true;
    return !(hi.array() >= lo.array()).all();
}

double reference_h_dot(const BarrierFunction& b, const ReferenceModel& ref, const Vec& x_m,
                       const Vec& r) {
    return b.grad(x_m).dot(ref.A_m * x_m + ref.B_m * r);
}

namespace {

const int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double radical_inverse(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * double(i % base);
        i /= base;
    }
    return r;
}

}  // namespace

HaltonSampler::HaltonSampler(int dim, std::uint64_t seed) : dim_(dim), shift_(Vec::Zero(dim)) {
    if (dim <= 0 || dim > int(std::size(kPrimes)))
        throw ModelError("halton: unsupported dimension");
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        for (int k = 0; k < dim; ++k) shift_(k) = U(rng);
    }
}

Vec HaltonSampler::next() {
    Vec x(dim_);
    for (int k = 0; k < dim_; ++k) {
        double v = radical_inverse(index_, kPrimes[k]) + shift_(k);
        x(k) = v - std::floor(v);
    }
    ++index_;
    return x;
}

LipschitzBudget estimate_lipschitz(const BarrierFunction& b, const Box& region, int samples,
                                   double safety, std::uint64_t seed) {
    if (region.empty()) throw ModelError("lipschitz: empty region");
    if (samples < 1000) throw ModelError("lipschitz: need at least 1000 samples");
    HaltonSampler hs(region.dim(), seed);
    Vec span = region.hi - region.lo;
    double sup = 0.0;
    int used = 0;
    for (int k = 0; k < samples; ++k) {
        Vec x = region.lo + span.cwiseProduct(hs.next());
        if (!b.in_domain(x)) continue;
        ++used;
        sup = std::max(sup, b.grad(x).norm());
    }
    if (used == 0) throw ModelError("lipschitz: no sampled point lies in the barrier domain");
    if (!(sup > 0.0)) throw ModelError("lipschitz: gradient vanishes on region, L1 = 0 is not a valid budget");
    LipschitzBudget lb;
    lb.L1 = safety * sup;
    lb.L2 = lb.L1;
    lb.region = region;
    return lb;
}

double gradient_check(const BarrierFunction& b, const Box& region, int count, std::uint64_t seed) {
    HaltonSampler hs(region.dim(), seed);
    Vec span = region.hi - region.lo;
    double worst = 0.0;
    int done = 0;
    for (int it = 0; done < count && it < 100 * count; ++it) {
        Vec x = region.lo + span.cwiseProduct(hs.next());
        if (!b.in_domain(x)) continue;
        ++done;
        Vec g = b.grad(x);
        // central differences with a scale-aware step
        Vec fd(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            double step = 1e-6 * std::max(1.0, std::abs(x(i)));
            Vec xp = x, xm = x;
            xp(i) += step;
            xm(i) -= step;
            fd(i) = (b.h(xp) - b.h(xm)) / (2.0 * step);
        }
        worst = std::max(worst, (fd - g).norm() / std::max(1.0, g.norm()));
    }
    return worst;
}

}  // namespace rsm
