#include "rvlab/core_sim.hpp"

#include <cmath>
#include <limits>

#include "rvlab/errors.hpp"
#include "rvlab/rng.hpp"

namespace rvlab {

NoiseFamily parse_noise_family(const std::string& name) {
    if (name == "gaussian") return NoiseFamily::gaussian;
    if (name == "uniform") return NoiseFamily::uniform;
    if (name == "gumbel") return NoiseFamily::gumbel;
    throw config_error("unknown noise family: '" + name + "'");
}

std::string to_string(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::gaussian: return "gaussian";
        case NoiseFamily::uniform: return "uniform";
        case NoiseFamily::gumbel: return "gumbel";
    }
    return "?";
}

NoiseSequence sample_noise(std::uint64_t seed, int horizon, int dim, NoiseFamily family) {
    if (horizon < 0) throw config_error("sample_noise: horizon must be >= 0");
    if (dim < 1) throw config_error("sample_noise: noise dimension must be >= 1");
    NoiseSequence ns;
    ns.seed = seed;
    ns.entries.reserve(horizon + 1);
    Rng rng(substream_seed(seed, 0x71583));
    for (int t = 0; t <= horizon; ++t) {
        switch (family) {
            case NoiseFamily::gaussian: ns.entries.push_back(rng.gaussian_vec(dim)); break;
            case NoiseFamily::uniform: ns.entries.push_back(rng.uniform_vec(dim)); break;
            case NoiseFamily::gumbel: ns.entries.push_back(rng.gumbel_vec(dim)); break;
        }
    }
    return ns;
}

namespace {

void check_compat(const ReparamMDP& mdp, const CertifiedFunction& encoder,
                  const CertifiedFunction& policy, const NoiseSequence& noise) {
    if (static_cast<int>(noise.entries.size()) != mdp.horizon + 1)
        throw config_error("rollout: noise length does not equal horizon + 1");
    if (encoder.in_dim() != mdp.d_s)
        throw config_error("rollout: encoder input dimension does not match d_s");
    if (policy.in_dim() != encoder.out_dim())
        throw config_error("rollout: policy input dimension does not match encoder output");
    if (policy.out_dim() != mdp.d_a)
        throw config_error("rollout: policy output dimension does not match d_a");
}

[[noreturn]] void diverged(int t) {
    throw numerical_error("rollout: non-finite state encountered at step " + std::to_string(t));
}

}  // namespace

Trajectory rollout(const ReparamMDP& mdp, const CertifiedFunction& encoder,
                   const CertifiedFunction& policy, const NoiseSequence& noise) {
    check_compat(mdp, encoder, policy, noise);
    Trajectory traj;
    const int T = mdp.horizon;
    traj.states.reserve(T + 1);
    traj.actions.reserve(T + 1);
    traj.rewards.reserve(T + 1);

    Vec s = mdp.init(noise.entries[0]);
    for (int t = 0; t <= T; ++t) {
        if (!s.allFinite()) diverged(t);
        Vec a = policy(encoder(s));
        traj.states.push_back(s);
        traj.actions.push_back(a);
        traj.rewards.push_back(mdp.reward(s, a));
        if (t < T) s = mdp.transition(s, a, noise.entries[t]);
    }
    return traj;
}

TransposedEpisode rollout_transposed(const ReparamMDP& mdp, const CertifiedFunction& encoder,
                                     const CertifiedFunction& policy, const NoiseSequence& noise,
                                     const ObservationMap& obs) {
    check_compat(mdp, encoder, policy, noise);
    TransposedEpisode ep;
    const int T = mdp.horizon;

    Vec s = mdp.init(noise.entries[0]);
    for (int t = 0; t <= T; ++t) {
        if (!s.allFinite()) diverged(t);
        Vec fs = obs(s, t);
        if (!fs.allFinite()) throw numerical_error("distractor produced a non-finite state at step " + std::to_string(t));
        Vec a = policy(encoder(fs));  // what the corrupted observation induces
        ep.traj.states.push_back(s);
        ep.traj.actions.push_back(a);
        ep.traj.rewards.push_back(mdp.reward(s, a));
        ep.observed.push_back(std::move(fs));
        // State evolution stays on the clean trajectory: the distractor acts
        // through the observation channel only.
        if (t < T) s = mdp.transition(s, policy(encoder(s)), noise.entries[t]);
    }
    return ep;
}

double discounted_return(const Trajectory& traj, double gamma) {
    KahanSum acc;
    double g = 1.0;
    for (double r : traj.rewards) {
        acc.add(g * r);
        g *= gamma;
    }
    return acc.value();
}

int gumbel_max_step(const DiscreteMDP& dmdp, int s, int a, const Vec& xi) {
    if (a < 0 || a >= static_cast<int>(dmdp.transition_table.size()))
        throw input_error("gumbel_max_step: action index out of range");
    const Mat& p = dmdp.transition_table[a];
    if (s < 0 || s >= p.rows()) throw input_error("gumbel_max_step: state index out of range");
    if (xi.size() != dmdp.n_states)
        throw input_error("gumbel_max_step: noise length must equal |S|");

    constexpr double kNegInf = -std::numeric_limits<double>::max();
    int best = -1;
    double best_score = kNegInf;
    double row_sum = 0.0;
    for (int j = 0; j < dmdp.n_states; ++j) {
        const double pj = p(s, j);
        row_sum += pj;
        const double score = pj > 0.0 ? xi[j] + std::log(pj) : kNegInf;
        if (score > best_score) {
            best_score = score;
            best = j;
        }
    }
    if (row_sum <= 0.0 || best < 0)
        throw input_error("gumbel_max_step: all-zero transition row (invalid model)");
    return best;
}

}  // namespace rvlab
