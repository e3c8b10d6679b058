#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rvlab/distractors.hpp"
#include "rvlab/instance.hpp"

namespace rvlab {

/// Which verification suites a run executes.
enum class BoundCheck {
    fixed_policy_shift,
    linear_noise,
    stochastic_noise,
    train_test,
    reward_shift,
    state_deviation,
    return_lipschitz,
    rademacher_scaling,
    gumbel_max,
};

BoundCheck parse_bound_check(const std::string& name);
std::string to_string(BoundCheck b);

struct DistractorSpec {
    std::string kind = "identity";
    double eta = 0.0;
    double sigma2 = 0.0;
    std::uint64_t seed = 0;
};

struct BigOConstants {
    double concentration_constant = 3.0;
    double rademacher_constant = 2.0;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    Dims dims;
    int horizon = 10;
    double gamma = 0.9;
    ConstantSet constants;
    std::string noise_family = "gaussian";
    double repr_radius = 5.0;
    DistractorSpec distractor;
    EnvPerturbation perturbation;
    double delta = 0.1;
    long n_episodes = 1000;
    std::vector<BoundCheck> checks;
    BigOConstants big_o;
    double margin_z = 4.0;
    std::string out_dir = "out";
    // Negative-control hook: every computed RHS is multiplied by this factor
    // before certification. Anything != 1 marks the run as a control.
    double rhs_scale = 1.0;
};

/// Parse and strictly validate a JSON config document. Unknown keys are
/// rejected with their field path; all schema violations raise config_error.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Bundled demo scenarios (see the `demo` subcommand).
ExperimentConfig demo_scenario(const std::string& name);
std::vector<std::string> demo_scenario_names();

}  // namespace rvlab
