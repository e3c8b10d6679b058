#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "rvlab/constants.hpp"

namespace rvlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A composable map with a certified upper bound on its Lipschitz constant.
///
/// The family is affine maps, optionally followed by a componentwise tanh
/// squashing and/or a projection onto a norm ball. Both post-stages are
/// 1-Lipschitz, so the certificate of the affine part carries through, and
/// certificates of compositions multiply exactly.
class CertifiedFunction {
public:
    enum class Kind { affine, affine_saturated, composition };

    CertifiedFunction() = default;

    static CertifiedFunction affine(Mat weight, Vec bias, double cert);
    static CertifiedFunction affine_saturated(Mat weight, Vec bias, double cert);
    static CertifiedFunction identity(int dim);
    static CertifiedFunction compose(CertifiedFunction outer, CertifiedFunction inner);

    Vec operator()(const Vec& x) const;

    Kind kind() const { return kind_; }
    const Mat& weight() const { return weight_; }
    const Vec& bias() const { return bias_; }
    double lipschitz_cert() const { return cert_; }
    int in_dim() const;
    int out_dim() const;

    /// Projection radius applied to the output (policy-input ball R_phi);
    /// infinity disables clipping. Projection is 1-Lipschitz, so the
    /// certificate is unchanged.
    void set_clip_radius(double r) { clip_radius_ = r; }
    double clip_radius() const { return clip_radius_; }

    /// Flattened parameters (row-major weight, then bias) for policy
    /// instances whose theta enters the bounds.
    Vec param_vector() const;
    int param_dim() const;
    static CertifiedFunction affine_from_params(const Vec& theta, int rows, int cols, double cert,
                                                bool saturated = false);

private:
    Kind kind_ = Kind::affine;
    Mat weight_;
    Vec bias_;
    double cert_ = 0.0;
    double clip_radius_ = std::numeric_limits<double>::infinity();
    std::vector<CertifiedFunction> parts_;  // composition, outermost first
};

/// Safe upper certificate on the spectral norm: power iteration on W^T W,
/// padded with a geometric estimate of the unconverged tail and inflated by
/// (1 + tol).
double certify_spectral_norm(const Mat& weight, double tol = 1e-10);

/// Random affine map rescaled so its spectral norm equals target_norm
/// (within 1e-9); the certificate is target_norm itself.
CertifiedFunction make_affine_with_norm(int rows, int cols, double target_norm,
                                        std::uint64_t seed, bool saturated = false);

/// Result of the bootstrap max-slope estimator.
struct LipschitzEstimate {
    double max_slope_k = 0.0;
    int n_pairs = 0;
    int pairs_skipped = 0;
};

/// Maximum of ||outer(inner(s)) - outer(inner(s'))|| / ||inner(s) - inner(s')||
/// over n_boot bootstrap pairs drawn from the sample batch. Pairs whose
/// denominator falls below dedup_eps are skipped as near-duplicates.
LipschitzEstimate empirical_max_slope(const CertifiedFunction& fn_outer,
                                      const CertifiedFunction& fn_inner,
                                      const std::vector<Vec>& samples, int n_boot,
                                      std::uint64_t seed, double dedup_eps = 1e-10);

}  // namespace rvlab
