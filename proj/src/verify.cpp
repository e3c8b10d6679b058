#include "rvlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rvlab/errors.hpp"
#include "rvlab/rng.hpp"

namespace rvlab {

namespace {

constexpr std::uint64_t kNoiseTag = 0x8081;
constexpr std::uint64_t kDistractorTag = 0xd024;

struct MeanStd {
    double mean = 0.0;
    double std_dev = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd ms;
    if (xs.empty()) return ms;
    KahanSum acc;
    for (double x : xs) acc.add(x);
    ms.mean = acc.value() / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        KahanSum sq;
        for (double x : xs) sq.add((x - ms.mean) * (x - ms.mean));
        ms.std_dev = std::sqrt(sq.value() / static_cast<double>(xs.size() - 1));
    }
    return ms;
}

PairedGapEstimate finalize_gaps(std::vector<double> gaps) {
    PairedGapEstimate est;
    est.n_episodes = static_cast<long>(gaps.size());
    const MeanStd ms = mean_std(gaps);
    est.mean_gap = std::abs(ms.mean);
    est.std_err = ms.std_dev / std::sqrt(static_cast<double>(gaps.size()));
    est.per_episode_gaps = std::move(gaps);
    return est;
}

// Relative slack for comparisons of floating-point chains that are equal in
// exact arithmetic.
bool leq_with_slack(double lhs, double rhs) {
    return lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs));
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::holds_within_margin: return "holds_within_margin";
        case Verdict::violated: return "violated";
    }
    return "?";
}

PairedGapEstimate estimate_fixed_policy_gap(const ReparamMDP& mdp, const CertifiedFunction& encoder,
                                            const CertifiedFunction& policy,
                                            const TransposeFunction& f, long n_episodes,
                                            std::uint64_t seed,
                                            std::vector<double>* gap_series_out) {
    if (n_episodes < 2) throw input_error("estimate_fixed_policy_gap: n_episodes must be >= 2");
    std::vector<double> gaps;
    gaps.reserve(n_episodes);
    std::vector<KahanSum> step_gaps(mdp.horizon + 1);

    for (long i = 0; i < n_episodes; ++i) {
        const NoiseSequence noise =
            sample_noise(substream_seed(seed, kNoiseTag, i), mdp.horizon, mdp.d_xi, mdp.noise_family);
        Rng frng(substream_seed(seed, kDistractorTag, i));
        try {
            const Trajectory clean = rollout(mdp, encoder, policy, noise);
            const TransposedEpisode ep =
                rollout_transposed(mdp, encoder, policy, noise, f.as_observation_map(&frng));
            gaps.push_back(discounted_return(ep.traj, mdp.gamma) -
                           discounted_return(clean, mdp.gamma));
            for (int t = 0; t <= mdp.horizon; ++t)
                step_gaps[t].add((ep.observed[t] - ep.traj.states[t]).norm());
        } catch (const numerical_error& e) {
            throw numerical_error(std::string(e.what()) + " (episode " + std::to_string(i) + ")");
        }
    }
    if (gap_series_out) {
        gap_series_out->resize(mdp.horizon + 1);
        for (int t = 0; t <= mdp.horizon; ++t)
            (*gap_series_out)[t] = step_gaps[t].value() / static_cast<double>(n_episodes);
    }
    return finalize_gaps(std::move(gaps));
}

PairedGapEstimate estimate_train_test_gap(const ReparamMDP& train_mdp, const ReparamMDP& test_mdp,
                                          const CertifiedFunction& encoder,
                                          const CertifiedFunction& policy,
                                          const TransposeFunction& f, long n_episodes,
                                          std::uint64_t seed) {
    if (n_episodes < 2) throw input_error("estimate_train_test_gap: n_episodes must be >= 2");
    std::vector<double> gaps;
    gaps.reserve(n_episodes);
    for (long i = 0; i < n_episodes; ++i) {
        const NoiseSequence noise = sample_noise(substream_seed(seed, kNoiseTag, i),
                                                 train_mdp.horizon, train_mdp.d_xi,
                                                 train_mdp.noise_family);
        Rng frng(substream_seed(seed, kDistractorTag, i));
        try {
            const Trajectory clean = rollout(train_mdp, encoder, policy, noise);
            const TransposedEpisode ep =
                rollout_transposed(test_mdp, encoder, policy, noise, f.as_observation_map(&frng));
            gaps.push_back(discounted_return(ep.traj, test_mdp.gamma) -
                           discounted_return(clean, train_mdp.gamma));
        } catch (const numerical_error& e) {
            throw numerical_error(std::string(e.what()) + " (episode " + std::to_string(i) + ")");
        }
    }
    return finalize_gaps(std::move(gaps));
}

DeviationSeries estimate_deviations(const ReparamMDP& mdp, const CertifiedFunction& encoder,
                                    const CertifiedFunction& policy, const TransposeFunction& f,
                                    long n_episodes, std::uint64_t seed) {
    if (n_episodes < 1) throw input_error("estimate_deviations: n_episodes must be >= 1");
    const int T = mdp.horizon;
    std::vector<std::vector<double>> state(T + 1), repr(T + 1), pol(T + 1), rew(T + 1);
    DeviationSeries out;
    out.samples.reserve(static_cast<std::size_t>(n_episodes) * (T + 1));

    for (long i = 0; i < n_episodes; ++i) {
        const NoiseSequence noise =
            sample_noise(substream_seed(seed, kNoiseTag, i), T, mdp.d_xi, mdp.noise_family);
        Rng frng(substream_seed(seed, kDistractorTag, i));
        const Trajectory clean = rollout(mdp, encoder, policy, noise);
        for (int t = 0; t <= T; ++t) {
            const Vec& s = clean.states[t];
            const Vec fs = f.apply(s, t, &frng);
            const Vec phi_s = encoder(s);
            const Vec phi_fs = encoder(fs);
            const Vec a_s = policy(phi_s);
            const Vec a_fs = policy(phi_fs);
            const double sd = (fs - s).norm();
            const double rd = (phi_fs - phi_s).norm();
            const double pd = (a_fs - a_s).norm();
            // Reward deviation in the sense of the deviation lemma: both the
            // state and action arguments move to their transposed versions.
            const double wd = std::abs(mdp.reward(fs, a_fs) - mdp.reward(s, a_s));
            state[t].push_back(sd);
            repr[t].push_back(rd);
            pol[t].push_back(pd);
            rew[t].push_back(wd);
            out.samples.push_back({i, t, sd, rd, pd, wd});
        }
    }
    for (int t = 0; t <= T; ++t) {
        const MeanStd s = mean_std(state[t]), r = mean_std(repr[t]), p = mean_std(pol[t]),
                      w = mean_std(rew[t]);
        out.state_dev_mean.push_back(s.mean);
        out.state_dev_std.push_back(s.std_dev);
        out.repr_dev_mean.push_back(r.mean);
        out.repr_dev_std.push_back(r.std_dev);
        out.policy_dev_mean.push_back(p.mean);
        out.policy_dev_std.push_back(p.std_dev);
        out.reward_dev_mean.push_back(w.mean);
        out.reward_dev_std.push_back(w.std_dev);
    }
    return out;
}

std::vector<StepVerdict> check_state_recursion(const ReparamMDP& mdp,
                                               const CertifiedFunction& encoder,
                                               const CertifiedFunction& policy,
                                               const EnvPerturbation& pert, long n_episodes,
                                               std::uint64_t seed) {
    const bool eps_only = pert.epsilon > 0.0 && pert.zeta == 0.0;
    const bool zeta_only = pert.zeta > 0.0 && pert.epsilon == 0.0;
    const bool both_zero = pert.zeta == 0.0 && pert.epsilon == 0.0;
    if (!(eps_only || zeta_only || both_zero))
        throw input_error("check_state_recursion: perturbation must be epsilon-only or zeta-only");

    const ReparamMDP test = perturb_mdp(mdp, pert, substream_seed(seed, 0xbead));
    const ConstantSet& c = mdp.constants;
    const DerivedConstants dc = compose_constants(c, mdp.gamma, mdp.horizon);
    const int T = mdp.horizon;

    std::vector<StepVerdict> verdicts(T + 1);
    for (int t = 0; t <= T; ++t) {
        verdicts[t].t = t;
        verdicts[t].closed_form = eps_only ? bound_state_dev_init(pert.epsilon, dc.nu, t)
                                           : bound_state_dev_transition(pert.zeta, dc.nu, t);
        verdicts[t].closed_ok = true;
        verdicts[t].recursion_ok = true;
    }

    for (long i = 0; i < n_episodes; ++i) {
        const NoiseSequence noise =
            sample_noise(substream_seed(seed, kNoiseTag, i), T, mdp.d_xi, mdp.noise_family);
        const Trajectory a = rollout(mdp, encoder, policy, noise);
        const Trajectory b = rollout(test, encoder, policy, noise);
        double prev_dev = 0.0;
        double prev_repr = 0.0;
        for (int t = 0; t <= T; ++t) {
            const double dev = (a.states[t] - b.states[t]).norm();
            verdicts[t].observed_max = std::max(verdicts[t].observed_max, dev);
            if (!leq_with_slack(dev, verdicts[t].closed_form)) verdicts[t].closed_ok = false;
            if (t > 0) {
                const double step_zeta = zeta_only ? pert.zeta : 0.0;
                const double recursion = c.L_t1 * prev_dev + c.L_t2 * c.L_pi1 * prev_repr + step_zeta;
                if (!leq_with_slack(dev, recursion)) verdicts[t].recursion_ok = false;
            }
            prev_dev = dev;
            prev_repr = (encoder(a.states[t]) - encoder(b.states[t])).norm();
        }
    }
    return verdicts;
}

ReturnLipschitzResult check_return_lipschitz(const ReparamMDP& mdp,
                                             const CertifiedFunction& encoder, double K,
                                             double repr_radius, long n_pairs,
                                             std::uint64_t seed) {
    if (n_pairs < 1) throw input_error("check_return_lipschitz: n_pairs must be >= 1");
    const int d_phi = encoder.out_dim();
    const int d_a = mdp.d_a;
    const int m = d_a * d_phi + d_a;

    // Family-level constants: L_pi1 is the worst case over the K-ball
    // (||W||_2 <= ||theta|| <= K) and L_pi2 is the ball-restricted gradient
    // bound.
    ConstantSet fam = mdp.constants;
    fam.L_pi1 = K;
    fam.L_pi2 = policy_param_lipschitz(repr_radius);
    const DerivedConstants dc = compose_constants(fam, mdp.gamma, mdp.horizon);

    ReturnLipschitzResult res;
    res.L_J = dc.L_J;
    res.n_pairs = n_pairs;
    Rng rng(substream_seed(seed, 0x2e7a));
    for (long i = 0; i < n_pairs; ++i) {
        const Vec theta_a = rng.ball(m, K);
        const Vec theta_b = rng.ball(m, K);
        const double dtheta = (theta_a - theta_b).norm();
        if (dtheta < 1e-12) continue;
        const NoiseSequence noise =
            sample_noise(substream_seed(seed, kNoiseTag, i), mdp.horizon, mdp.d_xi,
                         mdp.noise_family);
        const CertifiedFunction pa = policy_from_theta(theta_a, d_a, d_phi);
        const CertifiedFunction pb = policy_from_theta(theta_b, d_a, d_phi);
        const double ja = discounted_return(rollout(mdp, encoder, pa, noise), mdp.gamma);
        const double jb = discounted_return(rollout(mdp, encoder, pb, noise), mdp.gamma);
        res.max_ratio = std::max(res.max_ratio, std::abs(ja - jb) / dtheta);
    }
    res.holds = leq_with_slack(res.max_ratio, res.L_J);
    return res;
}

std::vector<Vec> default_policy_grid(int m, double K) {
    std::vector<Vec> grid;
    grid.reserve(2 * m + 1);
    grid.push_back(Vec::Zero(m));
    for (int i = 0; i < m; ++i) {
        Vec plus = Vec::Zero(m);
        plus[i] = K;
        grid.push_back(plus);
        grid.push_back(Vec(-plus));
    }
    return grid;
}

RademacherEstimate estimate_rademacher(const ReparamMDP& mdp, const CertifiedFunction& encoder,
                                       const std::vector<Vec>& policy_grid, long n_episodes,
                                       int n_sigma, std::uint64_t seed) {
    if (policy_grid.empty()) throw input_error("estimate_rademacher: empty policy grid");
    if (n_sigma < 1) throw input_error("estimate_rademacher: n_sigma must be >= 1");
    const int d_phi = encoder.out_dim();
    const int d_a = mdp.d_a;

    // Return matrix: J[g][i] for grid policy g on noise draw i.
    std::vector<std::vector<double>> J(policy_grid.size(), std::vector<double>(n_episodes));
    for (std::size_t g = 0; g < policy_grid.size(); ++g) {
        const CertifiedFunction pol = policy_from_theta(policy_grid[g], d_a, d_phi);
        for (long i = 0; i < n_episodes; ++i) {
            const NoiseSequence noise =
                sample_noise(substream_seed(seed, kNoiseTag, i), mdp.horizon, mdp.d_xi,
                             mdp.noise_family);
            J[g][i] = discounted_return(rollout(mdp, encoder, pol, noise), mdp.gamma);
        }
    }

    Rng sig_rng(substream_seed(seed, 0x51a4a));
    std::vector<double> sups;
    sups.reserve(n_sigma);
    std::vector<double> sigma(n_episodes);
    for (int k = 0; k < n_sigma; ++k) {
        for (long i = 0; i < n_episodes; ++i) sigma[i] = sig_rng.sign();
        double sup = -std::numeric_limits<double>::infinity();
        for (const auto& row : J) {
            KahanSum acc;
            for (long i = 0; i < n_episodes; ++i) acc.add(sigma[i] * row[i]);
            sup = std::max(sup, acc.value() / static_cast<double>(n_episodes));
        }
        sups.push_back(sup);
    }
    const MeanStd ms = mean_std(sups);
    RademacherEstimate est;
    est.value = ms.mean;
    est.std_err = ms.std_dev / std::sqrt(static_cast<double>(n_sigma));
    est.n_episodes = n_episodes;
    est.n_sigma_draws = n_sigma;
    est.n_policy_grid = static_cast<int>(policy_grid.size());
    return est;
}

double chi_square_critical_001(int dof) {
    // Standard upper-tail critical values at alpha = 0.001.
    static constexpr double kTable[] = {10.828, 13.816, 16.266, 18.467, 20.515, 22.458, 24.322};
    if (dof < 1 || dof > 7) throw input_error("chi_square_critical_001: dof must be in [1,7]");
    return kTable[dof - 1];
}

GumbelFitResult gumbel_max_fit(const Vec& row, long n_draws, std::uint64_t seed) {
    const int k = static_cast<int>(row.size());
    if (k < 2 || k > 8) throw input_error("gumbel_max_fit: row length must be in [2,8]");
    DiscreteMDP dmdp;
    dmdp.n_states = k;
    Mat p = Mat::Zero(k, k);
    p.row(0) = row.transpose();
    dmdp.transition_table.push_back(p);
    dmdp.initial_dist = row;

    std::vector<long> counts(k, 0);
    Rng rng(substream_seed(seed, 0x9b31));
    for (long i = 0; i < n_draws; ++i)
        ++counts[static_cast<std::size_t>(gumbel_max_step(dmdp, 0, 0, rng.gumbel_vec(k)))];

    GumbelFitResult res;
    res.n_states = k;
    res.n_draws = n_draws;
    int dof = -1;
    for (int j = 0; j < k; ++j) {
        const double expected = row[j] * static_cast<double>(n_draws);
        if (row[j] <= 0.0) {
            // Structural zero: never selectable, contributes no statistic.
            if (counts[static_cast<std::size_t>(j)] != 0)
                throw numerical_error("gumbel_max_fit: zero-probability state was selected");
            continue;
        }
        const double diff = static_cast<double>(counts[static_cast<std::size_t>(j)]) - expected;
        res.statistic += diff * diff / expected;
        ++dof;
    }
    if (dof < 1) throw input_error("gumbel_max_fit: degenerate row (single support point)");
    res.critical_value = chi_square_critical_001(dof);
    res.passes = res.statistic <= res.critical_value;
    return res;
}

BoundReport certify(const BoundValue& bound, const PairedGapEstimate& empirical, double z) {
    if (z < 0.0) throw input_error("certify: z must be >= 0");
    BoundReport rep;
    rep.bound = bound;
    rep.empirical = empirical;
    rep.margin = z * empirical.std_err;
    if (empirical.mean_gap - rep.margin > bound.value) {
        rep.verdict = Verdict::violated;
    } else if (empirical.mean_gap <= bound.value) {
        rep.verdict = Verdict::holds;
    } else {
        rep.verdict = Verdict::holds_within_margin;
    }
    if (bound.value == 0.0) {
        rep.tightness =
            empirical.mean_gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
        rep.tightness = empirical.mean_gap / bound.value;
    }
    return rep;
}

}  // namespace rvlab
