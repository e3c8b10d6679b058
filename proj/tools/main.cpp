#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rvlab/config.hpp"
#include "rvlab/errors.hpp"
#include "rvlab/runner.hpp"

namespace {

int dispatch(int argc, char** argv) {
    CLI::App app{"rvlab: closed-form robustness bounds for reparameterized rollouts,\n"
                 "verified by paired Monte Carlo simulation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string demo_name;
    std::string out_override;
    std::int64_t seed_override = -1;
    std::int64_t episodes_override = -1;
    bool strict = false;

    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--seed", seed_override, "override the config seed");
        sub->add_option("--out", out_override, "override the output directory");
        sub->add_option("--episodes", episodes_override, "override n_episodes");
        sub->add_flag("--strict", strict,
                      "treat holds-within-margin verdicts as failures (exit 1)");
    };

    CLI::App* run = app.add_subcommand("run", "run the checks requested by a config file");
    run->add_option("config", config_path, "path to a JSON config")->required();
    add_run_flags(run);

    CLI::App* demo = app.add_subcommand("demo", "run a named built-in scenario");
    demo->add_option("scenario", demo_name, "one of: " + [] {
        std::string s;
        for (const auto& n : rvlab::demo_scenario_names()) {
            if (!s.empty()) s += ", ";
            s += n;
        }
        return s;
    }())->required();
    add_run_flags(demo);

    CLI::App* catalog = app.add_subcommand("catalog", "print every implemented bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (catalog->parsed()) {
        rvlab::print_catalog(std::cout);
        return 0;
    }

    rvlab::ExperimentConfig cfg =
        run->parsed() ? rvlab::load_config(config_path) : rvlab::demo_scenario(demo_name);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (episodes_override > 0) cfg.n_episodes = episodes_override;

    const rvlab::RunSummary summary = rvlab::run_suite(cfg);
    std::cout << "manifest: " << summary.manifest_path << "\n";
    if (summary.any_violated) {
        std::cout << "result: VIOLATED\n";
        return 1;
    }
    if (summary.any_within_margin) {
        std::cout << "result: HOLDS (within statistical margin)\n";
        return strict ? 1 : 0;
    }
    std::cout << "result: HOLDS\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const rvlab::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const rvlab::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const rvlab::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const rvlab::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
