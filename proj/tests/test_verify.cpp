#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rvlab/bounds.hpp"
#include "rvlab/instance.hpp"
#include "rvlab/verify.hpp"

using namespace rvlab;

namespace {

// The canonical tightness witness: r(s, a) = a, pi = phi = id, T = 0.
ReparamMDP action_reward_chain() {
    ReparamMDP mdp;
    mdp.transition = [](const Vec& s, const Vec&, const Vec&) { return s; };
    mdp.init = [](const Vec&) { return Vec::Zero(1); };
    mdp.reward = [](const Vec&, const Vec& a) { return a[0]; };
    mdp.gamma = 0.9;
    mdp.horizon = 0;
    mdp.d_s = mdp.d_a = mdp.d_xi = 1;
    mdp.constants = {1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0};
    return mdp;
}

InstanceSpec small_spec() {
    InstanceSpec spec;
    spec.dims = {3, 2, 2, 3};
    spec.constants = {0.5, 0.3, 1.0, 0.0, 0.7, 1.0, 1.0, 1.0, 1.0};
    spec.gamma = 0.9;
    spec.horizon = 8;
    spec.seed = 77;
    return spec;
}

}  // namespace

TEST_CASE("identity distractor gives a zero gap") {
    const InstanceSpec spec = small_spec();
    const CertifiedInstance inst = make_certified_instance(spec);
    const TransposeFunction f = TransposeFunction::identity(spec.dims.d_s);
    const PairedGapEstimate est =
        estimate_fixed_policy_gap(inst.mdp, inst.encoder, inst.policy, f, 50, 5);
    CHECK(est.mean_gap == 0.0);
    CHECK(est.std_err == 0.0);
}

TEST_CASE("one-step chain realizes the bound exactly") {
    const ReparamMDP mdp = action_reward_chain();
    const CertifiedFunction id = CertifiedFunction::identity(1);
    Vec off(1);
    off << 0.3;
    const TransposeFunction f = TransposeFunction::additive_fixed(off);
    std::vector<double> series;
    const PairedGapEstimate est = estimate_fixed_policy_gap(mdp, id, id, f, 100, 6, &series);
    CHECK(est.mean_gap == doctest::Approx(0.3).epsilon(1e-12));
    BoundInputs in;
    in.constants = mdp.constants;
    in.derived = compose_constants(mdp.constants, mdp.gamma, mdp.horizon);
    in.gamma = mdp.gamma;
    in.T = 0;
    in.state_gap_series = series;
    const BoundValue rhs = bound_fixed_policy_shift(in);
    CHECK(rhs.value == doctest::Approx(0.3).epsilon(1e-12));
    const BoundReport rep = certify(rhs, est, 4.0);
    CHECK(rep.tightness == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.verdict != Verdict::violated);
}

TEST_CASE("deviations vanish under the identity distractor") {
    const InstanceSpec spec = small_spec();
    const CertifiedInstance inst = make_certified_instance(spec);
    const TransposeFunction f = TransposeFunction::identity(spec.dims.d_s);
    const DeviationSeries dev =
        estimate_deviations(inst.mdp, inst.encoder, inst.policy, f, 10, 7);
    for (const auto& s : dev.samples) {
        CHECK(s.state_dev == 0.0);
        CHECK(s.repr_dev == 0.0);
        CHECK(s.policy_dev == 0.0);
        CHECK(s.reward_dev == 0.0);
    }
    CHECK(dev.samples.size() == 10u * (spec.horizon + 1));
}

TEST_CASE("per-step lemma chain holds pointwise") {
    const InstanceSpec spec = small_spec();
    const CertifiedInstance inst = make_certified_instance(spec);
    const TransposeFunction f = TransposeFunction::additive_timevarying(spec.dims.d_s, 0.2, 44);
    const DeviationSeries dev =
        estimate_deviations(inst.mdp, inst.encoder, inst.policy, f, 30, 8);
    const ConstantSet& c = spec.constants;
    for (const auto& s : dev.samples) {
        CHECK(s.repr_dev <= c.L_phi * s.state_dev + 1e-12);
        CHECK(s.policy_dev <= c.L_pi1 * s.repr_dev + 1e-12);
        CHECK(s.reward_dev <= c.L_r1 * s.state_dev + c.L_r2 * s.policy_dev + 1e-12);
    }
}

TEST_CASE("certify implements the verdict rule") {
    BoundValue b;
    b.name = "x";
    b.value = 1.0;
    b.terms = {{"x", 1.0}};
    PairedGapEstimate est;
    est.n_episodes = 100;

    est.mean_gap = 0.5;
    est.std_err = 0.01;
    CHECK(certify(b, est, 4.0).verdict == Verdict::holds);
    CHECK(certify(b, est, 4.0).tightness == doctest::Approx(0.5));

    est.mean_gap = 1.02;
    est.std_err = 0.01;  // 1.02 - 0.04 <= 1 but 1.02 > 1
    CHECK(certify(b, est, 4.0).verdict == Verdict::holds_within_margin);

    est.mean_gap = 1.05;
    est.std_err = 0.002;  // 1.05 - 0.008 > 1
    CHECK(certify(b, est, 4.0).verdict == Verdict::violated);

    BoundValue zero;
    zero.value = 0.0;
    est.mean_gap = 0.0;
    est.std_err = 0.0;
    CHECK(certify(zero, est, 4.0).tightness == 0.0);
}

TEST_CASE("state recursion verdicts hold on a certified instance") {
    const InstanceSpec spec = small_spec();
    const CertifiedInstance inst = make_certified_instance(spec);
    for (const EnvPerturbation pert : {EnvPerturbation{0.0, 0.15, 0.0},
                                       EnvPerturbation{0.1, 0.0, 0.0}}) {
        const auto verdicts =
            check_state_recursion(inst.mdp, inst.encoder, inst.policy, pert, 40, 9);
        CHECK(verdicts.size() == static_cast<std::size_t>(spec.horizon) + 1);
        for (const auto& sv : verdicts) {
            CHECK(sv.closed_ok);
            CHECK(sv.recursion_ok);
        }
    }
}

TEST_CASE("return Lipschitz check holds with the family constants") {
    InstanceSpec spec = small_spec();
    spec.dims = {3, 1, 2, 3};
    const CertifiedInstance inst = make_certified_instance(spec);
    const ReturnLipschitzResult res =
        check_return_lipschitz(inst.mdp, inst.encoder, 1.0, spec.repr_radius, 500, 10);
    CHECK(res.holds);
    CHECK(res.max_ratio <= res.L_J * (1.0 + 1e-9));
    CHECK(res.max_ratio > 0.0);
}

TEST_CASE("Rademacher estimate of a singleton grid is centered at zero") {
    const InstanceSpec spec = small_spec();
    const CertifiedInstance inst = make_certified_instance(spec);
    std::vector<Vec> grid = {Vec::Zero(spec.dims.d_a * spec.dims.d_phi + spec.dims.d_a)};
    grid[0][0] = 0.5;
    const RademacherEstimate est = estimate_rademacher(inst.mdp, inst.encoder, grid, 256, 64, 11);
    CHECK(std::abs(est.value) <= 4.0 * est.std_err + 1e-12);
    CHECK(est.lower_estimate);
}

TEST_CASE("Rademacher estimate shrinks with n") {
    const InstanceSpec spec = small_spec();
    const CertifiedInstance inst = make_certified_instance(spec);
    const int m = spec.dims.d_a * spec.dims.d_phi + spec.dims.d_a;
    const auto grid = default_policy_grid(m, 1.0);
    CHECK(grid.size() == static_cast<std::size_t>(2 * m + 1));
    const double small_n = estimate_rademacher(inst.mdp, inst.encoder, grid, 16, 48, 12).value;
    const double large_n = estimate_rademacher(inst.mdp, inst.encoder, grid, 1024, 48, 12).value;
    CHECK(large_n < small_n);
}

TEST_CASE("chi-square critical values at alpha = 0.001") {
    CHECK(chi_square_critical_001(1) == doctest::Approx(10.828).epsilon(1e-3));
    CHECK(chi_square_critical_001(7) == doctest::Approx(24.322).epsilon(1e-3));
    CHECK_THROWS(chi_square_critical_001(0));
    CHECK_THROWS(chi_square_critical_001(8));
}

TEST_CASE("gumbel-max sampling fits the categorical row") {
    Vec row(4);
    row << 0.1, 0.2, 0.3, 0.4;
    const GumbelFitResult fit = gumbel_max_fit(row, 100000, 13);
    CHECK(fit.n_states == 4);
    CHECK(fit.critical_value == doctest::Approx(16.266).epsilon(1e-3));
    CHECK(fit.passes);
}
