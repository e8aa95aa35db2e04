#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "ampr/problem.hpp"

namespace ampr {

// One finite-p realization of the Gaussian linear model: training design
// X, reference panel W, test design S, responses, and the true signal.
struct SyntheticDataset {
    Eigen::MatrixXd x;   // n_x x p
    Eigen::MatrixXd w;   // n_w x p
    Eigen::MatrixXd s;   // n_s x p
    Eigen::VectorXd y_x;
    Eigen::VectorXd y_s;
    Eigen::VectorXd beta0;
    CovarianceModel sigma = CovarianceModel::identity(1);
    std::uint64_t seed = 0;

    int p() const { return static_cast<int>(x.cols()); }
    int n_x() const { return static_cast<int>(x.rows()); }
    int n_w() const { return static_cast<int>(w.rows()); }
    int n_s() const { return static_cast<int>(s.rows()); }
};

// Draws a dataset at dimension p. Sample sizes are round(p / gamma).
// Noise variances target the heritabilities exactly in expectation given
// the realized || beta0 ||_Sigma^2.
SyntheticDataset generate(const ProblemSpec& spec, int p, std::uint64_t seed);

// Columnar binary export ("AMPR1" magic, little-endian f64 matrices).
void save_dataset(const SyntheticDataset& data, const std::string& path);
SyntheticDataset load_dataset(const std::string& path);

}  // namespace ampr
