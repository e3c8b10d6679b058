#pragma once

#include <cmath>

#include "rvlab/errors.hpp"

namespace rvlab {

/// Compensated (Kahan) accumulator for long discounted sums.
class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Declared Lipschitz constants and bounds of a certified MDP instance.
struct ConstantSet {
    double L_t1 = 0.0;   // transition w.r.t. state
    double L_t2 = 0.0;   // transition w.r.t. action
    double L_pi1 = 0.0;  // policy w.r.t. representation
    double L_pi2 = 0.0;  // policy w.r.t. parameters
    double L_r1 = 0.0;   // reward w.r.t. state
    double L_r2 = 0.0;   // reward w.r.t. action
    double L_phi = 0.0;  // encoder
    double r_max = 1.0;  // reward magnitude bound
    double K = 1.0;      // policy parameter norm bound
};

// Threshold below which (nu^t - 1)/(nu - 1) switches to its limit form t.
inline constexpr double kNuOneThreshold = 1e-9;

/// (nu^t - 1)/(nu - 1), continuous across nu = 1.
inline double geometric_ratio(double nu, int t) {
    if (std::abs(nu - 1.0) < kNuOneThreshold) return static_cast<double>(t);
    return (std::pow(nu, t) - 1.0) / (nu - 1.0);
}

/// Constants derived from a ConstantSet; recomputed on demand, never cached.
struct DerivedConstants {
    double nu = 0.0;      // L_t1 + L_t2 L_pi1 L_phi
    double lambda = 0.0;  // L_r1 + L_r2 L_pi1 L_phi
    double L_J = 0.0;     // Lipschitz constant of the return w.r.t. theta
};

/// nu, lambda, and the return Lipschitz constant
///   L_J = sum_t gamma^t (lambda L_t2 L_pi2 (nu^t-1)/(nu-1) + L_r2 L_pi2).
inline DerivedConstants compose_constants(const ConstantSet& c, double gamma, int T) {
    if (gamma < 0.0 || gamma >= 1.0) throw input_error("compose_constants: gamma must be in [0,1)");
    if (T < 0) throw input_error("compose_constants: horizon must be >= 0");
    DerivedConstants d;
    d.nu = c.L_t1 + c.L_t2 * c.L_pi1 * c.L_phi;
    d.lambda = c.L_r1 + c.L_r2 * c.L_pi1 * c.L_phi;
    KahanSum acc;
    double g = 1.0;
    for (int t = 0; t <= T; ++t) {
        acc.add(g * (d.lambda * c.L_t2 * c.L_pi2 * geometric_ratio(d.nu, t) + c.L_r2 * c.L_pi2));
        g *= gamma;
    }
    d.L_J = acc.value();
    return d;
}

}  // namespace rvlab
