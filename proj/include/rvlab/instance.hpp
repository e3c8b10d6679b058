#pragma once

#include <cstdint>

#include "rvlab/core_sim.hpp"

namespace rvlab {

struct Dims {
    int d_s = 4;
    int d_a = 2;
    int d_phi = 3;
    int d_xi = 4;
};

/// A fully certified synthetic instance: affine transition with spectral
/// norms pinned to (L_t1, L_t2), saturated bounded reward with certs
/// (L_r1, L_r2, r_max), affine encoder with cert L_phi clipped to the
/// representation ball, and an affine policy with cert L_pi1.
struct CertifiedInstance {
    ReparamMDP mdp;
    CertifiedFunction encoder;
    CertifiedFunction policy;
    Dims dims;
    double repr_radius = 0.0;  // R_phi
};

struct InstanceSpec {
    Dims dims;
    ConstantSet constants;
    double gamma = 0.9;
    int horizon = 10;
    NoiseFamily noise_family = NoiseFamily::gaussian;
    double repr_radius = 5.0;
    std::uint64_t seed = 0;
};

/// Build an instance whose true Lipschitz constants are exactly the declared
/// ones (affine parts) or upper-bounded by them (saturated parts):
///   T(s,a,xi) = W_s s + W_a a + W_xi xi,   ||W_s|| = L_t1, ||W_a|| = L_t2
///   I(xi0)    = W_0 xi0                    (||W_0|| = 1)
///   r(s,a)    = r_max tanh((u_s.s + u_a.a)/r_max), ||u_s|| = L_r1, ||u_a|| = L_r2
///   phi(s)    = clip_{R_phi}(W_phi s),     ||W_phi|| = L_phi
///   pi(z)     = W_pi z,                    ||W_pi|| = L_pi1
CertifiedInstance make_certified_instance(const InstanceSpec& spec);

/// Affine policy from flattened theta (weight rows-major then bias), with a
/// certificate valid for any theta in the K-ball: ||W||_2 <= ||theta|| <= K.
CertifiedFunction policy_from_theta(const Vec& theta, int d_a, int d_phi);

/// L_pi2 certificate for the affine policy family restricted to the
/// representation ball of radius R_phi: gradients w.r.t. (W, b) are bounded
/// by sqrt(R_phi^2 + 1) <= R_phi + 1.
double policy_param_lipschitz(double repr_radius);

}  // namespace rvlab
