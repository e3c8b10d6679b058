#include "rvlab/func_families.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "rvlab/errors.hpp"
#include "rvlab/rng.hpp"

namespace rvlab {

CertifiedFunction CertifiedFunction::affine(Mat weight, Vec bias, double cert) {
    CertifiedFunction f;
    f.kind_ = Kind::affine;
    f.weight_ = std::move(weight);
    f.bias_ = std::move(bias);
    f.cert_ = cert;
    return f;
}

CertifiedFunction CertifiedFunction::affine_saturated(Mat weight, Vec bias, double cert) {
    CertifiedFunction f = affine(std::move(weight), std::move(bias), cert);
    f.kind_ = Kind::affine_saturated;
    return f;
}

CertifiedFunction CertifiedFunction::identity(int dim) {
    return affine(Mat::Identity(dim, dim), Vec::Zero(dim), 1.0);
}

CertifiedFunction CertifiedFunction::compose(CertifiedFunction outer, CertifiedFunction inner) {
    if (inner.out_dim() != outer.in_dim())
        throw config_error("compose: inner output dimension does not match outer input");
    CertifiedFunction f;
    f.kind_ = Kind::composition;
    f.cert_ = outer.cert_ * inner.cert_;
    f.parts_.push_back(std::move(outer));
    f.parts_.push_back(std::move(inner));
    return f;
}

Vec CertifiedFunction::operator()(const Vec& x) const {
    Vec y;
    if (kind_ == Kind::composition) {
        y = parts_[0](parts_[1](x));
    } else {
        if (x.size() != weight_.cols())
            throw config_error("CertifiedFunction: input dimension mismatch");
        y = weight_ * x + bias_;
        if (kind_ == Kind::affine_saturated) y = y.array().tanh().matrix();
    }
    if (std::isfinite(clip_radius_)) {
        const double nrm = y.norm();
        if (nrm > clip_radius_) y *= clip_radius_ / nrm;
    }
    return y;
}

int CertifiedFunction::in_dim() const {
    return kind_ == Kind::composition ? parts_[1].in_dim() : static_cast<int>(weight_.cols());
}

int CertifiedFunction::out_dim() const {
    return kind_ == Kind::composition ? parts_[0].out_dim() : static_cast<int>(weight_.rows());
}

Vec CertifiedFunction::param_vector() const {
    if (kind_ == Kind::composition)
        throw input_error("param_vector: not defined for compositions");
    Vec theta(weight_.size() + bias_.size());
    int k = 0;
    for (int i = 0; i < weight_.rows(); ++i)
        for (int j = 0; j < weight_.cols(); ++j) theta[k++] = weight_(i, j);
    for (int i = 0; i < bias_.size(); ++i) theta[k++] = bias_[i];
    return theta;
}

int CertifiedFunction::param_dim() const {
    if (kind_ == Kind::composition)
        throw input_error("param_dim: not defined for compositions");
    return static_cast<int>(weight_.size() + bias_.size());
}

CertifiedFunction CertifiedFunction::affine_from_params(const Vec& theta, int rows, int cols,
                                                        double cert, bool saturated) {
    if (theta.size() != static_cast<long>(rows) * cols + rows)
        throw input_error("affine_from_params: theta length does not match rows*cols + rows");
    Mat w(rows, cols);
    int k = 0;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) w(i, j) = theta[k++];
    Vec b(rows);
    for (int i = 0; i < rows; ++i) b[i] = theta[k++];
    return saturated ? affine_saturated(std::move(w), std::move(b), cert)
                     : affine(std::move(w), std::move(b), cert);
}

double certify_spectral_norm(const Mat& weight, double tol) {
    if (tol <= 0.0) throw input_error("certify_spectral_norm: tol must be positive");
    if (!weight.allFinite()) throw input_error("certify_spectral_norm: non-finite entries");
    if (weight.size() == 0) return 0.0;

    const Mat gram = weight.transpose() * weight;
    // Deterministic start vector with a small fixed perturbation so the
    // iterate is not orthogonal to the leading singular direction.
    Vec v(weight.cols());
    for (int i = 0; i < v.size(); ++i) v[i] = 1.0 + 1e-3 * ((i * 2654435761u) % 97);
    v.normalize();
    double est = 0.0;
    double prev_delta = -1.0;
    double tail = 0.0;
    constexpr int kMaxIter = 100000;
    for (int it = 0; it < kMaxIter; ++it) {
        Vec w = gram * v;
        const double nrm = w.norm();
        if (nrm == 0.0) return 0.0;  // weight maps v to zero; norm of a zero matrix
        const double next = std::sqrt(nrm);
        v = w / nrm;
        const double delta = std::abs(next - est);
        if (it > 0) {
            // Power iteration approaches sigma_1 from below with a roughly
            // geometric per-step gain; pad the certificate with a geometric
            // estimate of the remaining tail so it stays an upper bound even
            // when convergence is slow (sigma_2 close to sigma_1).
            const double rho = prev_delta > 0.0 ? std::min(delta / prev_delta, 0.999) : 0.0;
            tail = delta * rho / (1.0 - rho);
            if (delta + tail <= tol * std::max(next, 1e-300)) {
                est = next;
                break;
            }
        }
        prev_delta = delta;
        est = next;
    }
    return (1.0 + tol) * (est + 2.0 * tail);
}

CertifiedFunction make_affine_with_norm(int rows, int cols, double target_norm,
                                        std::uint64_t seed, bool saturated) {
    if (rows <= 0 || cols <= 0) throw input_error("make_affine_with_norm: bad shape");
    if (target_norm < 0.0) throw input_error("make_affine_with_norm: target_norm must be >= 0");
    if (target_norm == 0.0)
        return saturated
                   ? CertifiedFunction::affine_saturated(Mat::Zero(rows, cols), Vec::Zero(rows), 0.0)
                   : CertifiedFunction::affine(Mat::Zero(rows, cols), Vec::Zero(rows), 0.0);
    for (int attempt = 0; attempt < 16; ++attempt) {
        Rng rng(substream_seed(seed, 0xaff1, attempt));
        Mat w(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) w(i, j) = rng.gaussian();
        Eigen::JacobiSVD<Mat> svd(w);
        const double sigma1 = svd.singularValues()(0);
        if (sigma1 < 1e-12) continue;  // degenerate draw, retry with perturbed seed
        w *= target_norm / sigma1;
        return saturated ? CertifiedFunction::affine_saturated(std::move(w), Vec::Zero(rows),
                                                               target_norm)
                         : CertifiedFunction::affine(std::move(w), Vec::Zero(rows), target_norm);
    }
    throw numerical_error("make_affine_with_norm: repeated degenerate random draws");
}

LipschitzEstimate empirical_max_slope(const CertifiedFunction& fn_outer,
                                      const CertifiedFunction& fn_inner,
                                      const std::vector<Vec>& samples, int n_boot,
                                      std::uint64_t seed, double dedup_eps) {
    if (samples.size() < 2) throw input_error("empirical_max_slope: need at least 2 samples");
    if (n_boot < 1) throw input_error("empirical_max_slope: n_boot must be >= 1");

    Rng rng(substream_seed(seed, 0x510e5));
    LipschitzEstimate est;
    const auto n = samples.size();
    for (int b = 0; b < n_boot; ++b) {
        const auto i = static_cast<std::size_t>(rng.next_u64() % n);
        const auto j = static_cast<std::size_t>(rng.next_u64() % n);
        const Vec zi = fn_inner(samples[i]);
        const Vec zj = fn_inner(samples[j]);
        const double denom = (zi - zj).norm();
        if (denom < dedup_eps) {
            ++est.pairs_skipped;
            continue;
        }
        const double num = (fn_outer(zi) - fn_outer(zj)).norm();
        est.max_slope_k = std::max(est.max_slope_k, num / denom);
        ++est.n_pairs;
    }
    if (est.n_pairs == 0)
        throw numerical_error("empirical_max_slope: all pairs skipped (insufficient diversity)");
    return est;
}

}  // namespace rvlab
