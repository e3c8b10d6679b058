#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rvlab/bounds.hpp"
#include "rvlab/core_sim.hpp"
#include "rvlab/distractors.hpp"
#include "rvlab/instance.hpp"

namespace rvlab {

/// Common-random-number gap estimate: both arms of every episode share the
/// same NoiseSequence, so per-episode differences reflect only the compared
/// factor.
struct PairedGapEstimate {
    double mean_gap = 0.0;  // |mean(J_arm2) - mean(J_arm1)|
    double std_err = 0.0;   // sample std of per-episode gaps / sqrt(n)
    long n_episodes = 0;
    std::vector<double> per_episode_gaps;  // signed J_arm2 - J_arm1
};

/// Per-step deviations between the clean trajectory and its transposed view.
struct DeviationSeries {
    std::vector<double> state_dev_mean, state_dev_std;    // ||f(s_t) - s_t||
    std::vector<double> repr_dev_mean, repr_dev_std;      // ||phi(f(s_t)) - phi(s_t)||
    std::vector<double> policy_dev_mean, policy_dev_std;  // ||pi(phi(f)) - pi(phi)||
    std::vector<double> reward_dev_mean, reward_dev_std;  // |r(f(s),pi(phi(f))) - r(s,pi(phi))|
    struct Sample {
        long episode;
        int t;
        double state_dev, repr_dev, policy_dev, reward_dev;
    };
    std::vector<Sample> samples;  // per (episode, t), episode-major order
};

struct RademacherEstimate {
    double value = 0.0;
    double std_err = 0.0;  // across sign draws
    long n_episodes = 0;
    int n_sigma_draws = 0;
    int n_policy_grid = 0;
    bool lower_estimate = true;  // finite-grid supremum under-estimates the class supremum
};

enum class Verdict { holds, holds_within_margin, violated };
std::string to_string(Verdict v);

struct BoundReport {
    BoundValue bound;
    PairedGapEstimate empirical;
    double margin = 0.0;  // z * std_err
    Verdict verdict = Verdict::holds;
    double tightness = 0.0;  // mean_gap / bound.value (0 when both are 0)
};

/// Theorem "fixed policy shift": paired rollout/rollout_transposed per
/// episode. If gap_series_out is non-null it receives the plug-in per-step
/// mean of ||f(s_t) - s_t|| from the same episodes.
PairedGapEstimate estimate_fixed_policy_gap(const ReparamMDP& mdp, const CertifiedFunction& encoder,
                                            const CertifiedFunction& policy,
                                            const TransposeFunction& f, long n_episodes,
                                            std::uint64_t seed,
                                            std::vector<double>* gap_series_out = nullptr);

/// Train/test theorem: clean rollout in train_mdp vs transposed rollout in
/// test_mdp on the same noise.
PairedGapEstimate estimate_train_test_gap(const ReparamMDP& train_mdp, const ReparamMDP& test_mdp,
                                          const CertifiedFunction& encoder,
                                          const CertifiedFunction& policy,
                                          const TransposeFunction& f, long n_episodes,
                                          std::uint64_t seed);

DeviationSeries estimate_deviations(const ReparamMDP& mdp, const CertifiedFunction& encoder,
                                    const CertifiedFunction& policy, const TransposeFunction& f,
                                    long n_episodes, std::uint64_t seed);

/// Per-step verdicts for the state-deviation lemmas under an epsilon-only or
/// zeta-only environment perturbation.
struct StepVerdict {
    int t = 0;
    double observed_max = 0.0;   // max over episodes of ||s_t - s'_t||
    double closed_form = 0.0;    // nu^t eps  or  zeta (nu^t - 1)/(nu - 1)
    bool closed_ok = false;
    bool recursion_ok = false;   // one-step recursion bound
};

std::vector<StepVerdict> check_state_recursion(const ReparamMDP& mdp,
                                               const CertifiedFunction& encoder,
                                               const CertifiedFunction& policy,
                                               const EnvPerturbation& pert, long n_episodes,
                                               std::uint64_t seed);

/// Return-Lipschitz lemma: max over random theta pairs in the K-ball of
/// |J(theta) - J(theta')| / ||theta - theta'|| against L_J.
struct ReturnLipschitzResult {
    double max_ratio = 0.0;
    double L_J = 0.0;
    long n_pairs = 0;
    bool holds = false;
};

ReturnLipschitzResult check_return_lipschitz(const ReparamMDP& mdp,
                                             const CertifiedFunction& encoder, double K,
                                             double repr_radius, long n_pairs,
                                             std::uint64_t seed);

/// Axis grid for the Rademacher supremum: +/-K along each parameter axis
/// plus the origin (2m + 1 policies).
std::vector<Vec> default_policy_grid(int m, double K);

RademacherEstimate estimate_rademacher(const ReparamMDP& mdp, const CertifiedFunction& encoder,
                                       const std::vector<Vec>& policy_grid, long n_episodes,
                                       int n_sigma, std::uint64_t seed);

/// Verdict rule: violated iff mean_gap - z*std_err > bound.value; holds iff
/// mean_gap <= bound.value; holds_within_margin otherwise.
BoundReport certify(const BoundValue& bound, const PairedGapEstimate& empirical, double z);

/// Chi-square goodness-of-fit of Gumbel-max sampling against the exact
/// categorical row, at significance alpha = 0.001.
struct GumbelFitResult {
    int n_states = 0;
    long n_draws = 0;
    double statistic = 0.0;
    double critical_value = 0.0;  // chi-square, dof = n_states - 1, alpha = 0.001
    bool passes = false;
};

/// Upper critical value of the chi-square distribution at alpha = 0.001 for
/// dof in [1, 7] (enough for |S| <= 8).
double chi_square_critical_001(int dof);

GumbelFitResult gumbel_max_fit(const Vec& row, long n_draws, std::uint64_t seed);

}  // namespace rvlab
