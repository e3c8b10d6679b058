#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "rvlab/errors.hpp"
#include "rvlab/func_families.hpp"
#include "rvlab/rng.hpp"

using namespace rvlab;

namespace {

// Exact spectral norm of a 2x2 matrix:
// sigma1^2 = (||A||_F^2 + sqrt(||A||_F^4 - 4 det(A)^2)) / 2.
double spectral_norm_2x2(const Mat& a) {
    const double f2 = a.squaredNorm();
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return std::sqrt((f2 + std::sqrt(f2 * f2 - 4.0 * det * det)) / 2.0);
}

}  // namespace

TEST_CASE("identity map has certificate one") {
    const CertifiedFunction id = CertifiedFunction::identity(3);
    CHECK(id.lipschitz_cert() == 1.0);
    Vec x(3);
    x << 1.0, -2.0, 0.5;
    CHECK(id(x) == x);
}

TEST_CASE("affine map applies W x + b") {
    Mat w(2, 3);
    w << 1, 0, 2, 0, -1, 1;
    Vec b(2);
    b << 0.5, -0.5;
    const CertifiedFunction f = CertifiedFunction::affine(w, b, certify_spectral_norm(w));
    Vec x(3);
    x << 1, 1, 1;
    Vec expect(2);
    expect << 3.5, -0.5;
    CHECK((f(x) - expect).norm() < 1e-15);
}

TEST_CASE("power iteration certificate vs closed-form 2x2 oracle") {
    Rng rng(314);
    for (int trial = 0; trial < 50; ++trial) {
        Mat a(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) a(i, j) = rng.gaussian();
        const double truth = spectral_norm_2x2(a);
        const double cert = certify_spectral_norm(a);
        CHECK(cert >= truth * (1.0 - 1e-9));  // safe upper certificate
        CHECK(cert <= truth * (1.0 + 1e-6));  // and tight
    }
}

TEST_CASE("power iteration certificate vs SVD oracle on 5x5") {
    Rng rng(2718);
    for (int trial = 0; trial < 20; ++trial) {
        Mat a(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) a(i, j) = rng.gaussian();
        const double truth = Eigen::JacobiSVD<Mat>(a).singularValues()(0);
        const double cert = certify_spectral_norm(a);
        CHECK(cert >= truth * (1.0 - 1e-9));
        CHECK(cert <= truth * (1.0 + 1e-6));
    }
}

TEST_CASE("make_affine_with_norm pins the spectral norm") {
    for (double target : {0.3, 1.0, 2.0}) {
        const CertifiedFunction f = make_affine_with_norm(4, 3, target, 555);
        CHECK(f.lipschitz_cert() == doctest::Approx(target).epsilon(1e-12));
        const double sigma1 = Eigen::JacobiSVD<Mat>(f.weight()).singularValues()(0);
        CHECK(sigma1 == doctest::Approx(target).epsilon(1e-9));
    }
    const CertifiedFunction zero = make_affine_with_norm(3, 3, 0.0, 1);
    CHECK(zero.lipschitz_cert() == 0.0);
    CHECK(zero.weight().norm() == 0.0);
}

TEST_CASE("certificates are sound pairwise Lipschitz bounds") {
    Rng rng(31337);
    const CertifiedFunction lin = make_affine_with_norm(3, 4, 1.3, 777);
    const CertifiedFunction sat = make_affine_with_norm(2, 3, 0.8, 778, /*saturated=*/true);
    CertifiedFunction clipped = make_affine_with_norm(3, 4, 1.1, 779);
    clipped.set_clip_radius(0.7);
    for (int i = 0; i < 1000; ++i) {
        const Vec x = rng.gaussian_vec(4);
        const Vec y = rng.gaussian_vec(4);
        const double dx = (x - y).norm();
        if (dx < 1e-12) continue;
        CHECK((lin(x) - lin(y)).norm() <= lin.lipschitz_cert() * dx * (1.0 + 1e-12));
        CHECK((clipped(x) - clipped(y)).norm() <= clipped.lipschitz_cert() * dx * (1.0 + 1e-12));
        const Vec u = rng.gaussian_vec(3);
        const Vec v = rng.gaussian_vec(3);
        const double du = (u - v).norm();
        if (du < 1e-12) continue;
        CHECK((sat(u) - sat(v)).norm() <= sat.lipschitz_cert() * du * (1.0 + 1e-12));
    }
}

TEST_CASE("composition multiplies certificates and composes maps") {
    const CertifiedFunction outer = make_affine_with_norm(2, 3, 0.9, 41);
    const CertifiedFunction inner = make_affine_with_norm(3, 4, 1.4, 42);
    const CertifiedFunction comp = CertifiedFunction::compose(outer, inner);
    CHECK(comp.lipschitz_cert() == doctest::Approx(0.9 * 1.4).epsilon(1e-12));
    Rng rng(43);
    const Vec x = rng.gaussian_vec(4);
    CHECK((comp(x) - outer(inner(x))).norm() < 1e-14);
}

TEST_CASE("empirical max slope never exceeds the certificate") {
    Rng rng(4001);
    std::vector<Vec> samples;
    for (int i = 0; i < 200; ++i) samples.push_back(rng.gaussian_vec(3));
    const CertifiedFunction outer = make_affine_with_norm(2, 3, 1.2, 90);
    const CertifiedFunction inner = CertifiedFunction::identity(3);
    const LipschitzEstimate est = empirical_max_slope(outer, inner, samples, 1000, 91);
    CHECK(est.max_slope_k <= outer.lipschitz_cert() * (1.0 + 1e-10));
    CHECK(est.max_slope_k > 0.0);
    CHECK(est.n_pairs + est.pairs_skipped == 1000);
}

TEST_CASE("empirical max slope needs diverse samples") {
    std::vector<Vec> samples(50, Vec::Ones(3));
    const CertifiedFunction outer = make_affine_with_norm(2, 3, 1.0, 92);
    CHECK_THROWS_AS(empirical_max_slope(outer, CertifiedFunction::identity(3), samples, 100, 93),
                    numerical_error);
}

TEST_CASE("policy parameters round-trip through theta") {
    Rng rng(606);
    const Vec theta = rng.gaussian_vec(2 * 3 + 2);
    const CertifiedFunction pi = CertifiedFunction::affine_from_params(theta, 2, 3, theta.norm());
    CHECK((pi.param_vector() - theta).norm() < 1e-15);
    CHECK(pi.param_dim() == 8);
}
