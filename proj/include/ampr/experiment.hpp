#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ampr/problem.hpp"
#include "ampr/risk.hpp"

namespace ampr {

enum class ExperimentMode { TheorySweep, Simulate, AmpRun, Calibrate, FigureRecipe };

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::TheorySweep;
    ProblemSpec spec;
    std::vector<Estimator> estimators = {Estimator::Lasso, Estimator::RefLasso, Estimator::Ridge,
                                         Estimator::RefRidge};
    std::vector<double> lambda_grid;
    int p = 1000;
    int reps = 20;
    int t_max = 50;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    int jobs = 0;       // 0: library default thread count
    bool validate = false;  // figure mode: add desk-scale Monte Carlo columns

    void check() const;
};

ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

// Runs the configured experiment and returns the paths of the CSV
// artifacts it wrote. Throws ConfigParse for configuration problems and
// the numeric error types for solver failures.
std::vector<std::string> run_experiment(const ExperimentConfig& config);

// FNV-1a hash of the canonical config text (stamped into CSV headers).
std::uint64_t config_hash(const ExperimentConfig& config);

extern const char* kArtifactVersion;

}  // namespace ampr
