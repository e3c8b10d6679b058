#include "rvlab/bounds.hpp"

#include <cmath>

#include "rvlab/errors.hpp"

namespace rvlab {

namespace {

double sum_terms(const BoundValue& b) {
    KahanSum acc;
    for (const auto& [_, v] : b.terms) acc.add(v);
    return acc.value();
}

void check_gamma(double gamma) {
    if (gamma < 0.0 || gamma >= 1.0) throw input_error("gamma must be in [0,1)");
}

}  // namespace

double geom_sum(double gamma, int T) {
    check_gamma(gamma);
    if (T < 0) throw input_error("geom_sum: T must be >= 0");
    if (gamma == 0.0) return 1.0;
    if (std::abs(gamma - 1.0) < kNuOneThreshold) return static_cast<double>(T + 1);
    return (1.0 - std::pow(gamma, T + 1)) / (1.0 - gamma);
}

double ratio_sum(double gamma, double nu, int T) {
    check_gamma(gamma);
    if (nu < 0.0) throw input_error("ratio_sum: nu must be >= 0");
    KahanSum acc;
    double g = 1.0;
    for (int t = 0; t <= T; ++t) {
        acc.add(g * geometric_ratio(nu, t));
        g *= gamma;
    }
    return acc.value();
}

double power_sum(double gamma, double nu, int T) {
    check_gamma(gamma);
    KahanSum acc;
    double p = 1.0;
    for (int t = 0; t <= T; ++t) {
        acc.add(p);
        p *= gamma * nu;
    }
    return acc.value();
}

BoundValue bound_fixed_policy_shift(const BoundInputs& in) {
    if (static_cast<int>(in.state_gap_series.size()) != in.T + 1)
        throw input_error("bound_fixed_policy_shift: state_gap_series length must be T + 1");
    const ConstantSet& c = in.constants;
    KahanSum acc;
    double g = 1.0;
    for (int t = 0; t <= in.T; ++t) {
        acc.add(g * in.state_gap_series[static_cast<std::size_t>(t)]);
        g *= in.gamma;
    }
    BoundValue b;
    b.name = "fixed_policy_shift";
    b.terms.emplace_back("shift_term", c.L_r2 * c.L_pi1 * c.L_phi * acc.value());
    b.value = sum_terms(b);
    return b;
}

BoundValue bound_linear_noise(const BoundInputs& in) {
    if (in.eta < 0.0) throw input_error("bound_linear_noise: eta must be >= 0");
    // eta * sum_t gamma^t, evaluated through the same accumulation as the
    // fixed-policy bound so the constant-gap-series identity holds bitwise.
    BoundInputs constant_gap = in;
    constant_gap.state_gap_series.assign(static_cast<std::size_t>(in.T) + 1, in.eta);
    BoundValue b = bound_fixed_policy_shift(constant_gap);
    b.name = "linear_noise";
    return b;
}

BoundValue bound_stochastic_distractor(const BoundInputs& in) {
    if (in.delta <= 0.0 || in.delta >= 1.0)
        throw input_error("bound_stochastic_distractor: delta must be in (0,1)");
    const ConstantSet& c = in.constants;
    BoundValue b;
    b.name = "stochastic_distractor";
    const double factor = c.L_r2 * c.L_pi1 * c.L_phi * geom_sum(in.gamma, in.T);
    b.terms.emplace_back("mean_shift_term", factor * in.eta);
    b.terms.emplace_back("chebyshev_term", factor * std::sqrt(in.sigma2 / in.delta));
    b.value = sum_terms(b);
    return b;
}

double bound_state_dev_init(double epsilon, double nu, int t) {
    if (t < 0) throw input_error("bound_state_dev_init: t must be >= 0");
    return std::pow(nu, t) * epsilon;
}

double bound_state_dev_transition(double zeta, double nu, int t) {
    if (t < 0) throw input_error("bound_state_dev_transition: t must be >= 0");
    return zeta * geometric_ratio(nu, t);
}

BoundValue bound_train_test(const BoundInputs& in) {
    const ConstantSet& c = in.constants;
    const DerivedConstants& d = in.derived;
    BoundValue b;
    b.name = "train_test";
    b.terms.emplace_back("transition_term", d.lambda * in.zeta * ratio_sum(in.gamma, d.nu, in.T));
    b.terms.emplace_back("init_term", d.lambda * in.epsilon * power_sum(in.gamma, d.nu, in.T));
    b.terms.emplace_back("repr_term", c.L_r2 * c.L_pi1 * in.varrho * geom_sum(in.gamma, in.T));
    b.value = sum_terms(b);
    return b;
}

namespace {

BoundValue with_uniform_convergence(const BoundInputs& in, const std::string& name,
                                    double rademacher_term, double concentration_constant) {
    if (in.n < 1) throw input_error(name + ": n must be >= 1");
    if (in.delta <= 0.0 || in.delta >= 1.0) throw input_error(name + ": delta must be in (0,1)");
    BoundValue b = bound_train_test(in);
    b.name = name;
    b.terms.insert(b.terms.begin(), {"rademacher_term", rademacher_term});
    b.terms.emplace_back(
        "concentration_term",
        concentration_constant * in.constants.r_max *
            std::sqrt(std::log(1.0 / in.delta) / static_cast<double>(in.n)));
    b.value = sum_terms(b);
    return b;
}

}  // namespace

BoundValue bound_generalization(const BoundInputs& in, double rademacher_value,
                                double concentration_constant) {
    if (rademacher_value < 0.0)
        throw input_error("bound_generalization: rademacher_value must be >= 0");
    return with_uniform_convergence(in, "generalization", 2.0 * rademacher_value,
                                    concentration_constant);
}

BoundValue bound_final(const BoundInputs& in, double concentration_constant,
                       double rademacher_constant) {
    if (in.m < 1) throw input_error("bound_final: m must be >= 1");
    const double rad = rademacher_constant * in.derived.L_J * in.K *
                       std::sqrt(static_cast<double>(in.m) / static_cast<double>(in.n));
    return with_uniform_convergence(in, "final", rad, concentration_constant);
}

BoundValue bound_reward_shift(const BoundInputs& in, const BoundValue& base) {
    if (in.epsilon_r < 0.0) throw input_error("bound_reward_shift: epsilon_r must be >= 0");
    BoundValue b = base;
    b.name = base.name + "+reward_shift";
    b.terms.emplace_back("reward_term", geom_sum(in.gamma, in.T) * in.epsilon_r);
    b.value = sum_terms(b);
    return b;
}

}  // namespace rvlab
