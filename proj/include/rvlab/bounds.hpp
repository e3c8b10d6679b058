#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rvlab/constants.hpp"

namespace rvlab {

/// Everything the closed-form calculators consume.
struct BoundInputs {
    ConstantSet constants;
    DerivedConstants derived;
    double gamma = 0.9;
    int T = 0;
    double eta = 0.0;
    double sigma2 = 0.0;
    double delta = 0.1;         // confidence level
    double zeta = 0.0;
    double epsilon = 0.0;
    double epsilon_r = 0.0;
    double varrho = 0.0;        // representation deviation bound
    long n = 1;                 // episode budget
    int m = 1;                  // policy parameter count
    double K = 1.0;             // parameter norm bound
    std::vector<double> state_gap_series;  // per-step E||f(s_t) - s_t||
};

/// One theorem's right-hand side, with its named sub-terms. The value always
/// equals the sum of the terms.
struct BoundValue {
    std::string name;
    double value = 0.0;
    std::vector<std::pair<std::string, double>> terms;
};

/// sum_{t=0}^T gamma^t in closed form.
double geom_sum(double gamma, int T);

/// sum_{t=0}^T gamma^t (nu^t - 1)/(nu - 1), with the nu -> 1 limit taken when
/// |nu - 1| < 1e-9.
double ratio_sum(double gamma, double nu, int T);

/// sum_{t=0}^T (gamma * nu)^t.
double power_sum(double gamma, double nu, int T);

// Fixed-policy shift: L_r2 L_pi1 L_phi sum_t gamma^t E||f(s_t) - s_t||.
BoundValue bound_fixed_policy_shift(const BoundInputs& in);

// Linear bounded noise: L_r2 L_pi1 L_phi eta (1 - gamma^{T+1})/(1 - gamma).
BoundValue bound_linear_noise(const BoundInputs& in);

// Stochastic distractor (Chebyshev): the linear-noise form with eta replaced
// by eta + sqrt(sigma2 / delta); holds with probability >= 1 - delta.
BoundValue bound_stochastic_distractor(const BoundInputs& in);

/// ||s_t - s'_t|| <= nu^t epsilon (same transition, different init).
double bound_state_dev_init(double epsilon, double nu, int t);

/// ||s_t - s'_t|| <= zeta (nu^t - 1)/(nu - 1) (same init, different transition).
double bound_state_dev_transition(double zeta, double nu, int t);

// Train/test fixed policy: lambda zeta ratio_sum + lambda epsilon power_sum
// + L_r2 L_pi1 varrho geom_sum.
BoundValue bound_train_test(const BoundInputs& in);

// Generalization error: 2 Rad + train/test terms
// + concentration_constant * r_max * sqrt(log(1/delta)/n).
BoundValue bound_generalization(const BoundInputs& in, double rademacher_value,
                                double concentration_constant);

// Final theorem: the Rademacher term becomes
// rademacher_constant * L_J * K * sqrt(m/n).
BoundValue bound_final(const BoundInputs& in, double concentration_constant,
                       double rademacher_constant);

// Differing reward functions: base + geom_sum * epsilon_r.
BoundValue bound_reward_shift(const BoundInputs& in, const BoundValue& base);

}  // namespace rvlab
