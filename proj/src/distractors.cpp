#include "rvlab/distractors.hpp"

#include <cmath>

#include "rvlab/errors.hpp"
#include "rvlab/rng.hpp"

namespace rvlab {

namespace {

Vec unit_direction(Rng& rng, int dim) {
    Vec v = rng.gaussian_vec(dim);
    double nrm = v.norm();
    while (nrm < 1e-12) {
        v = rng.gaussian_vec(dim);
        nrm = v.norm();
    }
    return v / nrm;
}

}  // namespace

TransposeFunction TransposeFunction::identity(int dim) {
    TransposeFunction f;
    f.kind_ = Kind::identity;
    f.dim_ = dim;
    return f;
}

TransposeFunction TransposeFunction::additive_fixed(Vec offset) {
    TransposeFunction f;
    f.kind_ = Kind::additive_fixed;
    f.dim_ = static_cast<int>(offset.size());
    f.eta_ = offset.norm();
    f.fixed_offset_ = std::move(offset);
    return f;
}

TransposeFunction TransposeFunction::additive_timevarying(int dim, double eta,
                                                          std::uint64_t seed) {
    if (eta < 0.0) throw input_error("additive_timevarying: eta must be >= 0");
    TransposeFunction f;
    f.kind_ = Kind::additive_timevarying;
    f.dim_ = dim;
    f.eta_ = eta;
    f.seed_ = seed;
    return f;
}

TransposeFunction TransposeFunction::stochastic(int dim, double eta, double sigma2,
                                                std::uint64_t seed, bool check) {
    if (eta < 0.0 || sigma2 < 0.0) throw input_error("stochastic distractor: eta and sigma2 must be >= 0");
    TransposeFunction f;
    f.kind_ = Kind::stochastic;
    f.dim_ = dim;
    f.eta_ = eta;
    f.sigma2_ = sigma2;
    f.seed_ = seed;
    Rng rng(substream_seed(seed, 0xd157));
    f.mean_shift_ = eta > 0.0 ? Vec(eta * unit_direction(rng, dim)) : Vec(Vec::Zero(dim));

    if (check && sigma2 > 0.0) {
        // Monte Carlo check of the declared mean-shift bound: the sample mean
        // of f(s) - s over 1e5 draws must be within eta plus a 3-sigma CLT
        // margin of the origin.
        constexpr int kProbe = 100000;
        Rng probe(substream_seed(seed, 0xc4ec4));
        Vec acc = Vec::Zero(dim);
        const Vec origin = Vec::Zero(dim);
        for (int i = 0; i < kProbe; ++i) acc += f.apply(origin, 0, &probe);
        const double margin = 3.0 * std::sqrt(sigma2 / kProbe);
        if ((acc / kProbe).norm() > eta + margin)
            throw numerical_error("stochastic distractor: realized mean shift exceeds declared eta");
    }
    return f;
}

TransposeFunction TransposeFunction::generic(int dim, std::function<Vec(const Vec&, int)> map,
                                             double eta) {
    TransposeFunction f;
    f.kind_ = Kind::generic_deterministic;
    f.dim_ = dim;
    f.eta_ = eta;
    f.generic_ = std::move(map);
    return f;
}

Vec TransposeFunction::apply(const Vec& s, int t, Rng* rng) const {
    switch (kind_) {
        case Kind::identity:
            return s;
        case Kind::additive_fixed:
            return s + fixed_offset_;
        case Kind::additive_timevarying: {
            Rng step_rng(substream_seed(seed_, 0x7e4a, static_cast<std::uint64_t>(t)));
            return s + eta_ * unit_direction(step_rng, dim_);
        }
        case Kind::stochastic: {
            if (rng == nullptr)
                throw input_error("stochastic distractor requires a caller-provided RNG");
            // Isotropic components with total variance sigma2; clipping at
            // 6 sigma keeps draws finite-bounded with bias < 1e-6 sigma.
            const double comp_sd = std::sqrt(sigma2_ / dim_);
            Vec noise(dim_);
            for (int i = 0; i < dim_; ++i) {
                double g = rng->gaussian();
                g = std::max(-6.0, std::min(6.0, g));
                noise[i] = comp_sd * g;
            }
            return s + mean_shift_ + noise;
        }
        case Kind::generic_deterministic: {
            Vec out = generic_(s, t);
            if (!out.allFinite()) throw numerical_error("generic distractor produced non-finite output");
            return out;
        }
    }
    throw input_error("TransposeFunction: unknown kind");
}

std::string TransposeFunction::kind_name() const {
    switch (kind_) {
        case Kind::identity: return "identity";
        case Kind::additive_fixed: return "additive_fixed";
        case Kind::additive_timevarying: return "additive_timevarying";
        case Kind::stochastic: return "stochastic";
        case Kind::generic_deterministic: return "generic_deterministic";
    }
    return "?";
}

TransposeFunction::Kind TransposeFunction::parse_kind(const std::string& name) {
    if (name == "identity") return Kind::identity;
    if (name == "additive_fixed") return Kind::additive_fixed;
    if (name == "additive_timevarying") return Kind::additive_timevarying;
    if (name == "stochastic") return Kind::stochastic;
    if (name == "generic_deterministic") return Kind::generic_deterministic;
    throw config_error("unknown distractor kind: '" + name + "'");
}

StateGapEstimate max_state_gap(const TransposeFunction& f, const std::vector<Vec>& samples,
                               Rng* rng) {
    if (samples.empty()) throw input_error("max_state_gap: need at least one sample");
    StateGapEstimate est;
    est.stochastic = f.is_stochastic();
    Rng fallback(0x6a9);
    Rng* r = rng ? rng : &fallback;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Vec out = f.apply(samples[i], static_cast<int>(i), r);
        est.value = std::max(est.value, (out - samples[i]).norm());
    }
    return est;
}

ReparamMDP perturb_mdp(const ReparamMDP& base, const EnvPerturbation& pert, std::uint64_t seed) {
    if (!(std::isfinite(pert.zeta) && std::isfinite(pert.epsilon) && std::isfinite(pert.epsilon_r)))
        throw input_error("perturb_mdp: perturbation fields must be finite");

    Rng rng(substream_seed(seed, 0x9e27));
    ReparamMDP out = base;

    if (pert.epsilon > 0.0) {
        const Vec off = pert.epsilon * unit_direction(rng, base.d_s);
        auto init = base.init;
        out.init = [init, off](const Vec& xi0) { return Vec(init(xi0) + off); };
    }
    if (pert.zeta > 0.0) {
        const Vec off = pert.zeta * unit_direction(rng, base.d_s);
        auto trans = base.transition;
        out.transition = [trans, off](const Vec& s, const Vec& a, const Vec& xi) {
            return Vec(trans(s, a, xi) + off);
        };
    }
    if (pert.epsilon_r > 0.0) {
        const double off = pert.epsilon_r * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        auto rew = base.reward;
        out.reward = [rew, off](const Vec& s, const Vec& a) { return rew(s, a) + off; };
    }
    return out;
}

}  // namespace rvlab
