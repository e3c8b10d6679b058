#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "rvlab/config.hpp"
#include "rvlab/errors.hpp"

using namespace rvlab;

namespace {

const char* kMinimal = R"({
  "seed": 7,
  "gamma": 0.8,
  "horizon": 5,
  "constants": {"L_t1": 0.5, "L_t2": 0.3, "L_pi1": 1.0, "L_r1": 0.6, "L_r2": 1.0, "L_phi": 1.0},
  "bounds": ["linear-noise"],
  "distractor": {"kind": "additive_fixed", "eta": 0.1}
})";

bool message_mentions(const std::exception& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
    const ExperimentConfig cfg = parse_config_text(kMinimal);
    CHECK(cfg.seed == 7);
    CHECK(cfg.gamma == 0.8);
    CHECK(cfg.horizon == 5);
    CHECK(cfg.constants.L_t1 == 0.5);
    CHECK(cfg.n_episodes == 1000);
    CHECK(cfg.margin_z == 4.0);
    CHECK(cfg.rhs_scale == 1.0);
    REQUIRE(cfg.checks.size() == 1);
    CHECK(cfg.checks[0] == BoundCheck::linear_noise);
    CHECK(cfg.distractor.kind == "additive_fixed");
    CHECK(cfg.distractor.eta == 0.1);
}

TEST_CASE("unknown top-level keys are rejected with their path") {
    try {
        parse_config_text(R"({"seed": 1, "bounds": ["linear-noise"], "garbage": 3})");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(message_mentions(e, "garbage"));
    }
}

TEST_CASE("unknown nested keys are rejected with a field path") {
    try {
        parse_config_text(
            R"({"seed": 1, "bounds": ["linear-noise"], "distractor": {"kind": "identity", "etaa": 0.1}})");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(message_mentions(e, "distractor"));
        CHECK(message_mentions(e, "etaa"));
    }
}

TEST_CASE("schema violations raise config_error") {
    CHECK_THROWS_AS(parse_config_text("not json at all"), config_error);
    CHECK_THROWS_AS(parse_config_text(R"({"gamma": 1.5, "bounds": ["linear-noise"]})"),
                    config_error);
    CHECK_THROWS_AS(parse_config_text(R"({"gamma": -0.1, "bounds": ["linear-noise"]})"),
                    config_error);
    CHECK_THROWS_AS(parse_config_text(R"({"horizon": -2, "bounds": ["linear-noise"]})"),
                    config_error);
    CHECK_THROWS_AS(parse_config_text(R"({"n_episodes": 0, "bounds": ["linear-noise"]})"),
                    config_error);
    CHECK_THROWS_AS(parse_config_text(R"({"bounds": ["no-such-bound"]})"), config_error);
    CHECK_THROWS_AS(parse_config_text(R"({"seed": "a string", "bounds": ["linear-noise"]})"),
                    config_error);
}

TEST_CASE("bound check names round-trip") {
    for (const char* name :
         {"fixed-policy-shift", "linear-noise", "stochastic-noise", "train-test", "reward-shift",
          "state-deviation", "return-lipschitz", "rademacher-scaling", "gumbel-max"}) {
        CHECK(to_string(parse_bound_check(name)) == name);
    }
    CHECK_THROWS_AS(parse_bound_check("bogus"), config_error);
}

TEST_CASE("every demo scenario is constructible") {
    const auto names = demo_scenario_names();
    CHECK(names.size() == 8);
    for (const auto& name : names) {
        const ExperimentConfig cfg = demo_scenario(name);
        CHECK(!cfg.checks.empty());
    }
    CHECK_THROWS_AS(demo_scenario("nope"), config_error);
}

TEST_CASE("load_config on a missing file is an io_error") {
    CHECK_THROWS_AS(load_config("/definitely/not/a/file.json"), io_error);
}
