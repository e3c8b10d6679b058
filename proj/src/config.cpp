#include "rvlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rvlab/errors.hpp"

namespace rvlab {

using nlohmann::json;

BoundCheck parse_bound_check(const std::string& name) {
    if (name == "fixed-policy-shift") return BoundCheck::fixed_policy_shift;
    if (name == "linear-noise") return BoundCheck::linear_noise;
    if (name == "stochastic-noise") return BoundCheck::stochastic_noise;
    if (name == "train-test") return BoundCheck::train_test;
    if (name == "reward-shift") return BoundCheck::reward_shift;
    if (name == "state-deviation") return BoundCheck::state_deviation;
    if (name == "return-lipschitz") return BoundCheck::return_lipschitz;
    if (name == "rademacher-scaling") return BoundCheck::rademacher_scaling;
    if (name == "gumbel-max") return BoundCheck::gumbel_max;
    throw config_error("bounds: unknown check '" + name + "'");
}

std::string to_string(BoundCheck b) {
    switch (b) {
        case BoundCheck::fixed_policy_shift: return "fixed-policy-shift";
        case BoundCheck::linear_noise: return "linear-noise";
        case BoundCheck::stochastic_noise: return "stochastic-noise";
        case BoundCheck::train_test: return "train-test";
        case BoundCheck::reward_shift: return "reward-shift";
        case BoundCheck::state_deviation: return "state-deviation";
        case BoundCheck::return_lipschitz: return "return-lipschitz";
        case BoundCheck::rademacher_scaling: return "rademacher-scaling";
        case BoundCheck::gumbel_max: return "gumbel-max";
    }
    return "?";
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key))
            throw config_error("unknown key '" + path + key + "'");
    }
}

double get_number(const json& obj, const std::string& key, const std::string& path,
                  double fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) throw config_error("missing required key '" + path + key + "'");
        return fallback;
    }
    if (!obj[key].is_number()) throw config_error("'" + path + key + "' must be a number");
    return obj[key].get<double>();
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config parse failure: ") + e.what());
    }
    if (!doc.is_object()) throw config_error("config root must be an object");

    reject_unknown_keys(doc,
                        {"seed", "dims", "horizon", "gamma", "constants", "noise_family",
                         "repr_radius", "distractor", "perturbation", "delta", "n_episodes",
                         "bounds", "big_o", "margin_z", "out_dir", "rhs_scale"},
                        "");

    ExperimentConfig cfg;
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw config_error("'seed' must be a nonnegative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("dims")) {
        const json& d = doc["dims"];
        if (!d.is_object()) throw config_error("'dims' must be an object");
        reject_unknown_keys(d, {"d_s", "d_a", "d_phi", "d_xi"}, "dims.");
        cfg.dims.d_s = static_cast<int>(get_number(d, "d_s", "dims.", cfg.dims.d_s));
        cfg.dims.d_a = static_cast<int>(get_number(d, "d_a", "dims.", cfg.dims.d_a));
        cfg.dims.d_phi = static_cast<int>(get_number(d, "d_phi", "dims.", cfg.dims.d_phi));
        cfg.dims.d_xi = static_cast<int>(get_number(d, "d_xi", "dims.", cfg.dims.d_xi));
        if (cfg.dims.d_s < 1 || cfg.dims.d_a < 1 || cfg.dims.d_phi < 1 || cfg.dims.d_xi < 1)
            throw config_error("dims.*: all dimensions must be >= 1");
    }
    cfg.horizon = static_cast<int>(get_number(doc, "horizon", "", cfg.horizon));
    if (cfg.horizon < 0) throw config_error("'horizon' must be >= 0");
    cfg.gamma = get_number(doc, "gamma", "", cfg.gamma);
    if (cfg.gamma < 0.0 || cfg.gamma >= 1.0) throw config_error("'gamma' must be in [0,1)");
    if (doc.contains("constants")) {
        const json& c = doc["constants"];
        if (!c.is_object()) throw config_error("'constants' must be an object");
        reject_unknown_keys(c, {"L_t1", "L_t2", "L_pi1", "L_pi2", "L_r1", "L_r2", "L_phi",
                                "r_max", "K"},
                            "constants.");
        cfg.constants.L_t1 = get_number(c, "L_t1", "constants.", cfg.constants.L_t1);
        cfg.constants.L_t2 = get_number(c, "L_t2", "constants.", cfg.constants.L_t2);
        cfg.constants.L_pi1 = get_number(c, "L_pi1", "constants.", cfg.constants.L_pi1);
        cfg.constants.L_pi2 = get_number(c, "L_pi2", "constants.", cfg.constants.L_pi2);
        cfg.constants.L_r1 = get_number(c, "L_r1", "constants.", cfg.constants.L_r1);
        cfg.constants.L_r2 = get_number(c, "L_r2", "constants.", cfg.constants.L_r2);
        cfg.constants.L_phi = get_number(c, "L_phi", "constants.", cfg.constants.L_phi);
        cfg.constants.r_max = get_number(c, "r_max", "constants.", cfg.constants.r_max);
        cfg.constants.K = get_number(c, "K", "constants.", cfg.constants.K);
        if (cfg.constants.r_max <= 0.0) throw config_error("constants.r_max must be > 0");
        if (cfg.constants.K <= 0.0) throw config_error("constants.K must be > 0");
    }
    if (doc.contains("noise_family")) {
        if (!doc["noise_family"].is_string()) throw config_error("'noise_family' must be a string");
        cfg.noise_family = doc["noise_family"].get<std::string>();
        parse_noise_family(cfg.noise_family);  // validate
    }
    cfg.repr_radius = get_number(doc, "repr_radius", "", cfg.repr_radius);
    if (cfg.repr_radius <= 0.0) throw config_error("'repr_radius' must be > 0");
    if (doc.contains("distractor")) {
        const json& f = doc["distractor"];
        if (!f.is_object()) throw config_error("'distractor' must be an object");
        reject_unknown_keys(f, {"kind", "eta", "sigma2", "seed"}, "distractor.");
        if (f.contains("kind")) {
            if (!f["kind"].is_string()) throw config_error("'distractor.kind' must be a string");
            cfg.distractor.kind = f["kind"].get<std::string>();
            TransposeFunction::parse_kind(cfg.distractor.kind);  // validate
        }
        cfg.distractor.eta = get_number(f, "eta", "distractor.", 0.0);
        cfg.distractor.sigma2 = get_number(f, "sigma2", "distractor.", 0.0);
        cfg.distractor.seed =
            static_cast<std::uint64_t>(get_number(f, "seed", "distractor.", 0.0));
        if (cfg.distractor.eta < 0.0 || cfg.distractor.sigma2 < 0.0)
            throw config_error("distractor.eta and distractor.sigma2 must be >= 0");
    }
    if (doc.contains("perturbation")) {
        const json& p = doc["perturbation"];
        if (!p.is_object()) throw config_error("'perturbation' must be an object");
        reject_unknown_keys(p, {"zeta", "epsilon", "epsilon_r"}, "perturbation.");
        cfg.perturbation.zeta = get_number(p, "zeta", "perturbation.", 0.0);
        cfg.perturbation.epsilon = get_number(p, "epsilon", "perturbation.", 0.0);
        cfg.perturbation.epsilon_r = get_number(p, "epsilon_r", "perturbation.", 0.0);
        if (cfg.perturbation.zeta < 0.0 || cfg.perturbation.epsilon < 0.0 ||
            cfg.perturbation.epsilon_r < 0.0)
            throw config_error("perturbation.*: gaps must be >= 0");
    }
    cfg.delta = get_number(doc, "delta", "", cfg.delta);
    if (cfg.delta <= 0.0 || cfg.delta >= 1.0) throw config_error("'delta' must be in (0,1)");
    cfg.n_episodes = static_cast<long>(get_number(doc, "n_episodes", "", cfg.n_episodes));
    if (cfg.n_episodes < 1) throw config_error("'n_episodes' must be >= 1");
    if (doc.contains("bounds")) {
        if (!doc["bounds"].is_array()) throw config_error("'bounds' must be an array of strings");
        for (const auto& b : doc["bounds"]) {
            if (!b.is_string()) throw config_error("'bounds' entries must be strings");
            cfg.checks.push_back(parse_bound_check(b.get<std::string>()));
        }
    }
    if (doc.contains("big_o")) {
        const json& b = doc["big_o"];
        if (!b.is_object()) throw config_error("'big_o' must be an object");
        reject_unknown_keys(b, {"concentration_constant", "rademacher_constant"}, "big_o.");
        cfg.big_o.concentration_constant =
            get_number(b, "concentration_constant", "big_o.", cfg.big_o.concentration_constant);
        cfg.big_o.rademacher_constant =
            get_number(b, "rademacher_constant", "big_o.", cfg.big_o.rademacher_constant);
    }
    cfg.margin_z = get_number(doc, "margin_z", "", cfg.margin_z);
    if (cfg.margin_z < 0.0) throw config_error("'margin_z' must be >= 0");
    if (doc.contains("out_dir")) {
        if (!doc["out_dir"].is_string()) throw config_error("'out_dir' must be a string");
        cfg.out_dir = doc["out_dir"].get<std::string>();
    }
    cfg.rhs_scale = get_number(doc, "rhs_scale", "", cfg.rhs_scale);
    if (cfg.rhs_scale <= 0.0) throw config_error("'rhs_scale' must be > 0");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

ExperimentConfig base_demo() {
    ExperimentConfig cfg;
    cfg.seed = 2024;
    cfg.dims = {4, 2, 3, 4};
    cfg.horizon = 10;
    cfg.gamma = 0.9;
    cfg.constants.L_t1 = 0.6;
    cfg.constants.L_t2 = 0.4;
    cfg.constants.L_pi1 = 1.0;
    cfg.constants.L_pi2 = 0.0;  // derived from repr_radius where needed
    cfg.constants.L_r1 = 0.8;
    cfg.constants.L_r2 = 1.0;
    cfg.constants.L_phi = 1.0;
    cfg.constants.r_max = 1.0;
    cfg.constants.K = 1.0;
    cfg.repr_radius = 5.0;
    cfg.delta = 0.1;
    cfg.n_episodes = 1000;
    return cfg;
}

}  // namespace

ExperimentConfig demo_scenario(const std::string& name) {
    ExperimentConfig cfg = base_demo();
    if (name == "fixed-policy-shift") {
        cfg.distractor = {"additive_timevarying", 0.1, 0.0, 7};
        cfg.checks = {BoundCheck::fixed_policy_shift};
    } else if (name == "linear-noise") {
        cfg.distractor = {"additive_fixed", 0.1, 0.0, 7};
        cfg.checks = {BoundCheck::linear_noise};
    } else if (name == "stochastic-noise") {
        cfg.distractor = {"stochastic", 0.05, 0.01, 7};
        cfg.checks = {BoundCheck::stochastic_noise};
    } else if (name == "train-test") {
        cfg.distractor = {"additive_fixed", 0.1, 0.0, 7};
        cfg.perturbation = {0.05, 0.2, 0.0};
        cfg.checks = {BoundCheck::train_test, BoundCheck::state_deviation};
    } else if (name == "reward-shift") {
        cfg.distractor = {"additive_fixed", 0.1, 0.0, 7};
        cfg.perturbation = {0.05, 0.2, 0.1};
        cfg.checks = {BoundCheck::reward_shift};
    } else if (name == "return-lipschitz") {
        cfg.dims = {3, 1, 2, 3};
        cfg.checks = {BoundCheck::return_lipschitz};
    } else if (name == "rademacher-scaling") {
        cfg.dims = {3, 1, 2, 3};
        cfg.gamma = 0.9;
        cfg.checks = {BoundCheck::rademacher_scaling};
    } else if (name == "gumbel-max") {
        cfg.checks = {BoundCheck::gumbel_max};
    } else {
        throw config_error("unknown demo scenario '" + name + "'");
    }
    return cfg;
}

std::vector<std::string> demo_scenario_names() {
    return {"fixed-policy-shift", "linear-noise", "stochastic-noise",  "train-test",
            "return-lipschitz",   "rademacher-scaling", "reward-shift", "gumbel-max"};
}

}  // namespace rvlab
