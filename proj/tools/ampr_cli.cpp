#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ampr/errors.hpp"
#include "ampr/experiment.hpp"

namespace {

int run_mode(ampr::ExperimentMode mode, const std::string& config_path, const std::string& out_dir,
             std::uint64_t seed, bool seed_set, int jobs, bool validate) {
    try {
        ampr::ExperimentConfig config = ampr::load_experiment_config(config_path);
        config.mode = mode;
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (seed_set) config.seed = seed;
        if (jobs > 0) config.jobs = jobs;
        if (validate) config.validate = true;
        const auto outputs = ampr::run_experiment(config);
        for (const auto& path : outputs) std::cout << path << "\n";
        return 0;
    } catch (const ampr::ConfigParse& ex) {
        std::cerr << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << ex.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"State-evolution risk theory and Monte Carlo validation for "
                 "reference panel-based regularized estimators"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;
    bool validate = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file (key = value)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
            seed_set = true;
        });
        sub->add_option("--jobs", jobs, "max concurrent sweep points");
        sub->add_flag("--validate", validate, "add desk-scale Monte Carlo to figure recipes");
        return sub;
    };

    auto* theory = add_common(app.add_subcommand("theory-sweep", "state-evolution risk sweep"));
    auto* simulate = add_common(app.add_subcommand("simulate", "theory sweep plus Monte Carlo"));
    auto* amp = add_common(app.add_subcommand("amp-run", "AMP trajectories vs state evolution"));
    auto* calibrate = add_common(app.add_subcommand("calibrate", "lambda <-> alpha calibration"));
    auto* figure = add_common(app.add_subcommand("figure", "figure-recipe theory curves"));

    CLI11_PARSE(app, argc, argv);

    using ampr::ExperimentMode;
    if (theory->parsed())
        return run_mode(ExperimentMode::TheorySweep, config_path, out_dir, seed, seed_set, jobs, validate);
    if (simulate->parsed())
        return run_mode(ExperimentMode::Simulate, config_path, out_dir, seed, seed_set, jobs, validate);
    if (amp->parsed())
        return run_mode(ExperimentMode::AmpRun, config_path, out_dir, seed, seed_set, jobs, validate);
    if (calibrate->parsed())
        return run_mode(ExperimentMode::Calibrate, config_path, out_dir, seed, seed_set, jobs, validate);
    if (figure->parsed())
        return run_mode(ExperimentMode::FigureRecipe, config_path, out_dir, seed, seed_set, jobs, validate);
    return 2;
}
