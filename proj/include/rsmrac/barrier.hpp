#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "rsmrac/models.hpp"

namespace rsm {

class BarrierFunction {
public:
    virtual ~BarrierFunction() = default;
    virtual double h(const Vec& x) const = 0;
    virtual Vec grad(const Vec& x) const = 0;
    virtual std::string name() const = 0;
    // Points where the barrier is not meant to be evaluated (used to shape
    // the Lipschitz sampling region). Default: everywhere valid.
    virtual bool in_domain(const Vec&) const { return true; }
};

// h = ||p - p_o||^2 - r_o^2, p = x[pos .. pos+3)
class SphereBarrier : public BarrierFunction {
public:
    SphereBarrier(const Vec& center, double radius, int pos_index = 0);
    double h(const Vec& x) const override;
    Vec grad(const Vec& x) const override;
    std::string name() const override { return "sphere"; }

    const Vec& center() const { return p_o_; }
    double radius() const { return r_o_; }

private:
    Vec p_o_;
    double r_o_;
    int pos_;
};

// Distance braking barrier for double-integrator states x = (p, v):
//   h = d^T v / ||d|| + kappa (||d|| - r_o),  d = p - p_o
// Relative degree one w.r.t. acceleration inputs, and h >= 0 keeps the
// sphere barrier nonnegative (||d|| decays no faster than exp(-kappa t)
// toward r_o). Defined for ||d|| > 0; sampled outside the obstacle only.
class BrakingBarrier : public BarrierFunction {
public:
    BrakingBarrier(const Vec& center, double radius, double kappa, int pos_index = 0,
                   int vel_index = 3);
    double h(const Vec& x) const override;
    Vec grad(const Vec& x) const override;
    std::string name() const override { return "braking"; }
    bool in_domain(const Vec& x) const override;

    const Vec& center() const { return p_o_; }
    double radius() const { return r_o_; }
    double kappa() const { return kappa_; }

private:
    Vec p_o_;
    double r_o_;
    double kappa_;
    int pos_, vel_;
};

struct Box {
    Vec lo, hi;
    bool empty() const;
    int dim() const { return int(lo.size()); }
};

struct LipschitzBudget {
    double L1 = 0.0;
    double L2 = 0.0;
    Box region;
};

inline double barrier_error(const BarrierFunction& b, const Vec& x_p, const Vec& x_m) {
    return b.h(x_p) - b.h(x_m);
}

// grad h(x_m)^T (A_m x_m + B_m r)
double reference_h_dot(const BarrierFunction& b, const ReferenceModel& ref, const Vec& x_m,
                       const Vec& r);

// Deterministic low-discrepancy point set (Halton, first primes), with a
// seed-driven Cranley-Patterson shift. Returns points in [0,1)^dim.
class HaltonSampler {
public:
    HaltonSampler(int dim, std::uint64_t seed = 0);
    Vec next();

private:
    int dim_;
    std::uint64_t index_ = 1;
    Vec shift_;
};

// L1 = safety * max ||grad h|| over sampled in-domain points of region; L2 = L1
LipschitzBudget estimate_lipschitz(const BarrierFunction& b, const Box& region, int samples,
                                   double safety = 1.1, std::uint64_t seed = 0);

// Relative finite-difference gradient check; returns max relative error over
// `count` sampled in-domain points of region.
double gradient_check(const BarrierFunction& b, const Box& region, int count,
                      std::uint64_t seed = 0);

}  // namespace rsm
