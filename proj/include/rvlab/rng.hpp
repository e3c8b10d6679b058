#pragma once

#include <cstdint>
#include <cmath>

#include <Eigen/Core>

namespace rvlab {

/// Stateless 64-bit mixer (splitmix64 finalizer). Used to derive independent
/// substreams from a master seed and integer labels.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(seed ^ mix64(a)) ^ mix64(b ^ 0xa5a5a5a5a5a5a5a5ULL));
}

/// Deterministic RNG with hand-rolled transforms so that a given seed yields
/// the same stream on every platform (std::normal_distribution does not
/// guarantee that).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix64(seed ^ 0x853c49e6748fea9bULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1); safe as a log argument.
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return u;
    }

    /// Standard normal via Box-Muller (pair cached).
    double gaussian() {
        if (has_cache_) {
            has_cache_ = false;
            return cache_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        cache_ = r * std::sin(a);
        has_cache_ = true;
        return r * std::cos(a);
    }

    /// Standard Gumbel: -log(-log(U)).
    double gumbel() { return -std::log(-std::log(uniform_open())); }

    /// Rademacher sign in {-1, +1}.
    double sign() { return (next_u64() & 1u) ? 1.0 : -1.0; }

    Eigen::VectorXd gaussian_vec(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = gaussian();
        return v;
    }

    Eigen::VectorXd uniform_vec(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform();
        return v;
    }

    Eigen::VectorXd gumbel_vec(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = gumbel();
        return v;
    }

    /// Uniform point in the closed ball of the given radius (dimension dim).
    Eigen::VectorXd ball(int dim, double radius) {
        Eigen::VectorXd v = gaussian_vec(dim);
        const double nrm = v.norm();
        if (nrm == 0.0) return Eigen::VectorXd::Zero(dim);
        const double r = radius * std::pow(uniform_open(), 1.0 / dim);
        return v * (r / nrm);
    }

private:
    std::uint64_t state_;
    double cache_ = 0.0;
    bool has_cache_ = false;
};

}  // namespace rvlab
