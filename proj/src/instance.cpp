#include "rvlab/instance.hpp"

#include <cmath>

#include "rvlab/errors.hpp"
#include "rvlab/rng.hpp"

namespace rvlab {

CertifiedInstance make_certified_instance(const InstanceSpec& spec) {
    const Dims& d = spec.dims;
    const ConstantSet& c = spec.constants;
    if (d.d_s < 1 || d.d_a < 1 || d.d_phi < 1 || d.d_xi < 1)
        throw config_error("make_certified_instance: dimensions must be >= 1");
    if (c.r_max <= 0.0) throw config_error("make_certified_instance: r_max must be > 0");

    CertifiedInstance inst;
    inst.dims = d;
    inst.repr_radius = spec.repr_radius;

    const auto sub = [&](std::uint64_t tag) { return substream_seed(spec.seed, tag); };

    const Mat W_s = make_affine_with_norm(d.d_s, d.d_s, c.L_t1, sub(1)).weight();
    const Mat W_a = make_affine_with_norm(d.d_s, d.d_a, c.L_t2, sub(2)).weight();
    const Mat W_xi = make_affine_with_norm(d.d_s, d.d_xi, 1.0, sub(3)).weight();
    const Mat W_0 = make_affine_with_norm(d.d_s, d.d_xi, 1.0, sub(4)).weight();
    const Vec u_s = make_affine_with_norm(1, d.d_s, c.L_r1, sub(5)).weight().row(0);
    const Vec u_a = make_affine_with_norm(1, d.d_a, c.L_r2, sub(6)).weight().row(0);
    const double r_max = c.r_max;

    ReparamMDP mdp;
    mdp.d_s = d.d_s;
    mdp.d_a = d.d_a;
    mdp.d_xi = d.d_xi;
    mdp.gamma = spec.gamma;
    mdp.horizon = spec.horizon;
    mdp.constants = c;
    mdp.noise_family = spec.noise_family;
    mdp.transition = [W_s, W_a, W_xi](const Vec& s, const Vec& a, const Vec& xi) {
        return Vec(W_s * s + W_a * a + W_xi * xi);
    };
    mdp.init = [W_0](const Vec& xi0) { return Vec(W_0 * xi0); };
    mdp.reward = [u_s, u_a, r_max](const Vec& s, const Vec& a) {
        return r_max * std::tanh((u_s.dot(s) + u_a.dot(a)) / r_max);
    };
    inst.mdp = std::move(mdp);

    inst.encoder = make_affine_with_norm(d.d_phi, d.d_s, c.L_phi, sub(7));
    inst.encoder.set_clip_radius(spec.repr_radius);
    inst.policy = make_affine_with_norm(d.d_a, d.d_phi, c.L_pi1, sub(8));
    return inst;
}

CertifiedFunction policy_from_theta(const Vec& theta, int d_a, int d_phi) {
    // Spectral norm <= Frobenius norm <= ||theta||, so ||theta|| certifies
    // L_pi1 for this instance.
    return CertifiedFunction::affine_from_params(theta, d_a, d_phi, theta.norm());
}

double policy_param_lipschitz(double repr_radius) {
    return std::sqrt(repr_radius * repr_radius + 1.0);
}

}  // namespace rvlab
