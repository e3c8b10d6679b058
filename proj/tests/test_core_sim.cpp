#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rvlab/core_sim.hpp"
#include "rvlab/errors.hpp"
#include "rvlab/rng.hpp"

using namespace rvlab;

namespace {

// 1-d chain: s0 = 1, s stays put, reward is the state itself.
ReparamMDP constant_chain(double gamma, int horizon) {
    ReparamMDP mdp;
    mdp.transition = [](const Vec& s, const Vec&, const Vec&) { return s; };
    mdp.init = [](const Vec&) { return Vec::Ones(1); };
    mdp.reward = [](const Vec& s, const Vec&) { return s[0]; };
    mdp.gamma = gamma;
    mdp.horizon = horizon;
    mdp.d_s = mdp.d_a = mdp.d_xi = 1;
    return mdp;
}

}  // namespace

TEST_CASE("noise sampling is deterministic in the seed") {
    const NoiseSequence a = sample_noise(42, 5, 3, NoiseFamily::gaussian);
    const NoiseSequence b = sample_noise(42, 5, 3, NoiseFamily::gaussian);
    const NoiseSequence c = sample_noise(43, 5, 3, NoiseFamily::gaussian);
    REQUIRE(a.entries.size() == 6);
    for (std::size_t t = 0; t < a.entries.size(); ++t) CHECK(a.entries[t] == b.entries[t]);
    CHECK(a.entries[0] != c.entries[0]);
}

TEST_CASE("uniform noise lands in [0, 1)") {
    const NoiseSequence u = sample_noise(7, 200, 4, NoiseFamily::uniform);
    for (const Vec& xi : u.entries)
        for (int i = 0; i < xi.size(); ++i) {
            CHECK(xi[i] >= 0.0);
            CHECK(xi[i] < 1.0);
        }
}

TEST_CASE("gumbel noise has the Euler-Mascheroni mean") {
    Rng rng(99);
    KahanSum acc;
    const long n = 100000;
    for (long i = 0; i < n; ++i) acc.add(rng.gumbel());
    CHECK(acc.value() / n == doctest::Approx(0.5772156649).epsilon(0.02));
}

TEST_CASE("rollout reproduces a geometric return") {
    const ReparamMDP mdp = constant_chain(0.5, 2);
    const CertifiedFunction id = CertifiedFunction::identity(1);
    const NoiseSequence noise = sample_noise(1, 2, 1, NoiseFamily::gaussian);
    const Trajectory traj = rollout(mdp, id, id, noise);
    REQUIRE(traj.states.size() == 3);
    REQUIRE(traj.rewards.size() == 3);
    CHECK(discounted_return(traj, 0.5) == doctest::Approx(1.75).epsilon(1e-15));
}

TEST_CASE("rollout is bitwise deterministic") {
    ReparamMDP mdp = constant_chain(0.9, 20);
    mdp.transition = [](const Vec& s, const Vec& a, const Vec& xi) {
        return Vec(0.6 * s + 0.3 * a + 0.1 * xi);
    };
    const CertifiedFunction id = CertifiedFunction::identity(1);
    const NoiseSequence noise = sample_noise(5, 20, 1, NoiseFamily::gaussian);
    const Trajectory t1 = rollout(mdp, id, id, noise);
    const Trajectory t2 = rollout(mdp, id, id, noise);
    for (std::size_t t = 0; t < t1.states.size(); ++t) {
        CHECK(t1.states[t] == t2.states[t]);
        CHECK(t1.rewards[t] == t2.rewards[t]);
    }
}

TEST_CASE("transposed rollout with the identity map matches the clean one") {
    ReparamMDP mdp = constant_chain(0.9, 10);
    mdp.transition = [](const Vec& s, const Vec& a, const Vec& xi) {
        return Vec(0.5 * s + 0.2 * a + 0.05 * xi);
    };
    const CertifiedFunction id = CertifiedFunction::identity(1);
    const NoiseSequence noise = sample_noise(11, 10, 1, NoiseFamily::gaussian);
    const Trajectory clean = rollout(mdp, id, id, noise);
    const TransposedEpisode ep =
        rollout_transposed(mdp, id, id, noise, [](const Vec& s, int) { return s; });
    for (std::size_t t = 0; t < clean.states.size(); ++t) {
        CHECK(clean.states[t] == ep.traj.states[t]);
        CHECK(clean.rewards[t] == ep.traj.rewards[t]);
        CHECK(ep.observed[t] == clean.states[t]);
    }
}

TEST_CASE("transposed rollout keeps the clean state sequence") {
    // r(s, a) = a: a 0.3 observation shift moves every reward by exactly 0.3
    // while states are untouched.
    ReparamMDP mdp = constant_chain(0.5, 2);
    mdp.reward = [](const Vec&, const Vec& a) { return a[0]; };
    const CertifiedFunction id = CertifiedFunction::identity(1);
    const NoiseSequence noise = sample_noise(3, 2, 1, NoiseFamily::gaussian);
    const Trajectory clean = rollout(mdp, id, id, noise);
    const TransposedEpisode ep = rollout_transposed(
        mdp, id, id, noise, [](const Vec& s, int) { return Vec(s.array() + 0.3); });
    for (std::size_t t = 0; t < clean.states.size(); ++t) {
        CHECK(ep.traj.states[t] == clean.states[t]);
        CHECK(ep.traj.rewards[t] == doctest::Approx(clean.rewards[t] + 0.3).epsilon(1e-15));
    }
    CHECK(discounted_return(ep.traj, 0.5) - discounted_return(clean, 0.5) ==
          doctest::Approx(0.3 * 1.75).epsilon(1e-14));
}

TEST_CASE("discounted_return trivial cases") {
    Trajectory traj;
    traj.rewards = {1.0};
    CHECK(discounted_return(traj, 0.9) == 1.0);
    traj.rewards = {0.0, 0.0, 0.0};
    CHECK(discounted_return(traj, 0.9) == 0.0);
}

TEST_CASE("gumbel_max_step degenerate row always picks the unit mass") {
    DiscreteMDP dmdp;
    dmdp.n_states = 3;
    Mat table = Mat::Zero(3, 3);
    table(0, 2) = 1.0;
    table(1, 0) = 1.0;
    table(2, 1) = 1.0;
    dmdp.transition_table = {table};
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        CHECK(gumbel_max_step(dmdp, 0, 0, rng.gumbel_vec(3)) == 2);
        CHECK(gumbel_max_step(dmdp, 1, 0, rng.gumbel_vec(3)) == 0);
    }
}

TEST_CASE("gumbel_max_step rejects an all-zero row") {
    DiscreteMDP dmdp;
    dmdp.n_states = 2;
    dmdp.transition_table = {Mat::Zero(2, 2)};
    Rng rng(1);
    CHECK_THROWS_AS(gumbel_max_step(dmdp, 0, 0, rng.gumbel_vec(2)), input_error);
}

TEST_CASE("gumbel_max_step roughly matches a symmetric row") {
    DiscreteMDP dmdp;
    dmdp.n_states = 2;
    Mat table(2, 2);
    table << 0.5, 0.5, 0.5, 0.5;
    dmdp.transition_table = {table};
    Rng rng(23);
    long hits = 0;
    const long n = 20000;
    for (long i = 0; i < n; ++i)
        if (gumbel_max_step(dmdp, 0, 0, rng.gumbel_vec(2)) == 0) ++hits;
    CHECK(std::abs(hits / static_cast<double>(n) - 0.5) < 0.02);
}

TEST_CASE("returns respect the r_max envelope") {
    ReparamMDP mdp = constant_chain(0.9, 30);
    mdp.reward = [](const Vec& s, const Vec&) { return std::tanh(s[0]); };
    const CertifiedFunction id = CertifiedFunction::identity(1);
    const NoiseSequence noise = sample_noise(2, 30, 1, NoiseFamily::gaussian);
    const Trajectory traj = rollout(mdp, id, id, noise);
    CHECK(std::abs(discounted_return(traj, 0.9)) <= (1.0 - std::pow(0.9, 31)) / 0.1 + 1e-12);
}
