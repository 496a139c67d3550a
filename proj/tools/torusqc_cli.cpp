// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
//
// Command-line front end: assemble an ExperimentConfig from an optional
// JSON file plus flags (flags win), run the scenario, and map the outcome
// to the documented exit codes (0 ok, 2 bad configuration, 3 numerics).
#include <torusqc/runner.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{
        "torusqc — quantum-classical fidelity experiments for kicked torus "
        "maps"};
    app.set_version_flag("--version", torusqc::version_string);

    std::string config_path, map_s, k_s, mu_s, n_s, formalism_s, scenario_s,
        out_s;
    double k2 = 0.0, mu2 = 0.0, sigma = 0.0;
    int l_period = 0, steps = 0, ensemble = 0, resolution = 0;
    std::uint64_t seed = 0;

    app.add_option("--config", config_path,
                   "JSON config file; explicit flags override its values");
    app.add_option("--map", map_s, "classical map: sawtooth or pcat");
    app.add_option("--K", k_s,
                   "sawtooth kick strength(s): scalar, comma list, or "
                   "start:stop:step");
    app.add_option("--mu", mu_s,
                   "perturbed-cat kick strength(s), same grammar as --K");
    app.add_option("--K2", k2, "echo scenario: perturbed kick strength");
    app.add_option("--mu2", mu2, "echo scenario: perturbed cat strength");
    app.add_option("--L", l_period, "momentum period (integer >= 1)");
    app.add_option("--N", n_s,
                   "Hilbert dimension(s): scalar, comma list, or range");
    app.add_option("--formalism", formalism_s,
                   "phase-space representation: continuous or discrete");
    app.add_option("--sigma", sigma, "packet squeezing parameter (> 0)");
    app.add_option("--steps", steps,
                   "time horizon (lyapunov: trajectory length)");
    app.add_option("--ensemble", ensemble,
                   "packet-ensemble size (lyapunov: trajectory count)");
    app.add_option("--seed", seed, "base RNG seed");
    app.add_option("--resolution", resolution,
                   "quadrature nodes per axis (0 picks the 3N default)");
    app.add_option("--scenario", scenario_s,
                   "series, t1scan, negativity, echo, snapshots, or lyapunov");
    app.add_option("--out", out_s, "output directory (created if missing)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    torusqc::RunOutcome outcome;
    try {
        nlohmann::json j = nlohmann::json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in)
                throw std::invalid_argument("config: cannot open file '" +
                                            config_path + "'");
            in >> j;
        }
        if (app.count("--map")) j["map"] = map_s;
        if (app.count("--K")) j["K"] = k_s;
        if (app.count("--mu")) j["mu"] = mu_s;
        if (app.count("--K2")) j["K2"] = k2;
        if (app.count("--mu2")) j["mu2"] = mu2;
        if (app.count("--L")) j["L"] = l_period;
        if (app.count("--N")) j["N"] = n_s;
        if (app.count("--formalism")) j["formalism"] = formalism_s;
        if (app.count("--sigma")) j["sigma"] = sigma;
        if (app.count("--steps")) j["steps"] = steps;
        if (app.count("--ensemble")) j["ensemble"] = ensemble;
        if (app.count("--seed")) j["seed"] = seed;
        if (app.count("--resolution")) j["resolution"] = resolution;
        if (app.count("--scenario")) j["scenario"] = scenario_s;
        if (app.count("--out")) j["out"] = out_s;

        const torusqc::ExperimentConfig cfg = torusqc::config_from_json(j);
        outcome = torusqc::run_experiment(cfg);
    } catch (const std::exception& e) {
        std::cerr << "torusqc: " << e.what() << '\n';
        return 2;
    }

    if (!outcome.message.empty())
        std::cerr << "torusqc: " << outcome.message << '\n';
    return outcome.exit_code;
}
