#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "rvlab/core_sim.hpp"
#include "rvlab/rng.hpp"

namespace rvlab {

/// The distractor model f applied to observations at test time. It never
/// alters the true dynamics; rollouts feed it through the observation
/// channel only.
class TransposeFunction {
public:
    enum class Kind { identity, additive_fixed, additive_timevarying, stochastic, generic_deterministic };

    static TransposeFunction identity(int dim);
    /// f(s) = s + offset with ||offset|| <= eta (eta declared as ||offset||).
    static TransposeFunction additive_fixed(Vec offset);
    /// f(s) = s + e_t, e_t a pure function of (seed, t) with ||e_t|| = eta.
    static TransposeFunction additive_timevarying(int dim, double eta, std::uint64_t seed);
    /// f(s) = s + shift + noise: ||shift|| = eta, total noise variance sigma2,
    /// per-component draws clipped at 6 sigma. The declared mean-shift bound
    /// is checked by Monte Carlo at construction when check = true.
    static TransposeFunction stochastic(int dim, double eta, double sigma2, std::uint64_t seed,
                                        bool check = true);
    static TransposeFunction generic(int dim, std::function<Vec(const Vec&, int)> map,
                                     double eta);

    /// One application at step t. The caller supplies the RNG for the
    /// stochastic kind (deterministic kinds ignore it).
    Vec apply(const Vec& s, int t, Rng* rng = nullptr) const;

    /// ObservationMap adapter for rollout_transposed.
    ObservationMap as_observation_map(Rng* rng = nullptr) const {
        return [this, rng](const Vec& s, int t) { return apply(s, t, rng); };
    }

    Kind kind() const { return kind_; }
    double eta() const { return eta_; }
    double sigma2() const { return sigma2_; }
    bool is_stochastic() const { return kind_ == Kind::stochastic; }
    std::string kind_name() const;

    static Kind parse_kind(const std::string& name);

private:
    Kind kind_ = Kind::identity;
    int dim_ = 0;
    double eta_ = 0.0;
    double sigma2_ = 0.0;
    std::uint64_t seed_ = 0;
    Vec fixed_offset_;
    Vec mean_shift_;
    std::function<Vec(const Vec&, int)> generic_;
};

/// max over samples of ||f(s) - s||. For stochastic f this is the max over
/// one realization per sample and is flagged as such. Supports choosing an
/// encoder constant via L_phi <= varrho / max_s ||f(s) - s||.
struct StateGapEstimate {
    double value = 0.0;
    bool stochastic = false;
};

StateGapEstimate max_state_gap(const TransposeFunction& f, const std::vector<Vec>& samples,
                               Rng* rng = nullptr);

/// Declared sup-norm gaps between the training and testing environment maps.
struct EnvPerturbation {
    double zeta = 0.0;       // sup ||T - T'||
    double epsilon = 0.0;    // sup ||I - I'||
    double epsilon_r = 0.0;  // sup |r - r'|
};

/// Testing MDP with T' = T + offset_T, I' = I + offset_I, r' = r + offset_r,
/// each offset a constant field of norm exactly the declared gap (so the sup
/// bounds hold by construction). Lipschitz constants are unchanged.
ReparamMDP perturb_mdp(const ReparamMDP& base, const EnvPerturbation& pert, std::uint64_t seed);

}  // namespace rvlab
