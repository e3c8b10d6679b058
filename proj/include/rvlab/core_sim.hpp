#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rvlab/constants.hpp"
#include "rvlab/func_families.hpp"

namespace rvlab {

enum class NoiseFamily { gaussian, uniform, gumbel };

NoiseFamily parse_noise_family(const std::string& name);
std::string to_string(NoiseFamily family);

/// Pre-drawn peripheral random variables xi_0..xi_T. All randomness of an
/// episode lives here; rollouts are deterministic functions of it.
struct NoiseSequence {
    std::vector<Vec> entries;  // length T+1
    std::uint64_t seed = 0;
};

NoiseSequence sample_noise(std::uint64_t seed, int horizon, int dim, NoiseFamily family);

/// Deterministic MDP triple (transition, initialization, reward) with its
/// declared constants. The maps take pre-sampled noise as an argument, so the
/// whole rollout is a pure function.
struct ReparamMDP {
    std::function<Vec(const Vec& s, const Vec& a, const Vec& xi)> transition;
    std::function<Vec(const Vec& xi0)> init;
    std::function<double(const Vec& s, const Vec& a)> reward;
    double gamma = 0.9;
    int horizon = 0;  // episode has horizon+1 steps
    ConstantSet constants;
    int d_s = 1, d_a = 1, d_xi = 1;
    NoiseFamily noise_family = NoiseFamily::gaussian;
};

struct Trajectory {
    std::vector<Vec> states;    // length T+1
    std::vector<Vec> actions;   // length T+1
    std::vector<double> rewards;  // length T+1
};

/// Map from the true state to what the policy observes at step t; identity
/// for clean rollouts, the transpose function for transposed ones.
using ObservationMap = std::function<Vec(const Vec& s, int t)>;

/// Deterministic episode: s0 = I(xi_0), s_{t+1} = T(s_t, pi(phi(s_t)), xi_t).
Trajectory rollout(const ReparamMDP& mdp, const CertifiedFunction& encoder,
                   const CertifiedFunction& policy, const NoiseSequence& noise);

/// Transposed rollout: the state sequence is the clean one (the distractor
/// corrupts only the observation channel), while the recorded action at step
/// t is pi(phi(obs(s_t, t))) and the recorded reward is r(s_t, that action).
/// The observed (transposed) states are returned alongside for diagnostics.
struct TransposedEpisode {
    Trajectory traj;
    std::vector<Vec> observed;  // obs(s_t, t) per step
};

TransposedEpisode rollout_transposed(const ReparamMDP& mdp, const CertifiedFunction& encoder,
                                     const CertifiedFunction& policy, const NoiseSequence& noise,
                                     const ObservationMap& obs);

/// sum_t gamma^t rewards[t], compensated summation.
double discounted_return(const Trajectory& traj, double gamma);

/// Finite multinomial MDP for the Gumbel-max demonstration.
struct DiscreteMDP {
    int n_states = 0;
    // transition_table[a] is an n_states x n_states row-stochastic matrix.
    std::vector<Mat> transition_table;
    Vec initial_dist;
};

/// argmax_j xi[j] + log p(s, a, j). Zero-probability states map to the most
/// negative finite value and are never selected against finite noise.
int gumbel_max_step(const DiscreteMDP& dmdp, int s, int a, const Vec& xi);

}  // namespace rvlab
