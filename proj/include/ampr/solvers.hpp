#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ampr/dataset.hpp"
#include "ampr/risk.hpp"

namespace ampr {

struct FitOptions {
    double kkt_tol = 1e-7;
    int max_sweeps = 100000;
    int screen_after = 5;  // full sweeps before active-set screening kicks in
};

// The summary-statistics view of a dataset: only X^T X / n_x (or
// W^T W / n_w) and X^T y_x / n_x enter any estimator.
struct SummaryStats {
    Eigen::MatrixXd gram_x;  // X^T X / n_x
    Eigen::MatrixXd gram_w;  // W^T W / n_w
    Eigen::VectorXd xty;     // X^T y_x / n_x
};

SummaryStats build_summary(const SyntheticDataset& data);

// minimize 1/2 beta^T A beta - beta^T b + theta || beta ||_1 by cyclic
// coordinate descent with active-set screening.
Eigen::VectorXd coordinate_descent(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double theta,
                                   const FitOptions& opts = {},
                                   const Eigen::VectorXd* warm_start = nullptr);

Eigen::VectorXd fit_ref_lasso(const SyntheticDataset& data, double lambda, const FitOptions& opts = {});
Eigen::VectorXd fit_lasso(const SyntheticDataset& data, double lambda, const FitOptions& opts = {});
Eigen::VectorXd fit_ridge(const SyntheticDataset& data, double lambda);
Eigen::VectorXd fit_ref_ridge(const SyntheticDataset& data, double lambda);

// Summary-statistics versions (p needed for the lambda / sqrt(p) penalty).
Eigen::VectorXd fit_ref_lasso(const SummaryStats& stats, int p, double lambda,
                              const FitOptions& opts = {}, const Eigen::VectorXd* warm = nullptr);
Eigen::VectorXd fit_lasso(const SummaryStats& stats, int p, double lambda,
                          const FitOptions& opts = {}, const Eigen::VectorXd* warm = nullptr);
Eigen::VectorXd fit_ridge(const SummaryStats& stats, double lambda);
Eigen::VectorXd fit_ref_ridge(const SummaryStats& stats, double lambda);

Eigen::VectorXd fit_estimator(const SummaryStats& stats, int p, Estimator estimator, double lambda,
                              const FitOptions& opts = {}, const Eigen::VectorXd* warm = nullptr);

struct EvalResult {
    double mse = 0.0;
    double r2 = 0.0;
};

// mse = (beta - beta0)^T Sigma (beta - beta0); r2 is the squared cosine
// between y_s and S beta (0 when S beta == 0).
EvalResult evaluate(const SyntheticDataset& data, const Eigen::VectorXd& beta_hat);

struct EmpiricalRisk {
    std::vector<double> mse_values;
    std::vector<double> r2_values;
    double mse_mean = 0.0;
    double mse_se = 0.0;
    double r2_mean = 0.0;
    double r2_se = 0.0;
};

EmpiricalRisk summarize(const std::vector<double>& mse, const std::vector<double>& r2);

// Independent replicates with deterministically split seeds; replicates
// may execute in parallel, aggregation order is fixed.
EmpiricalRisk monte_carlo(const ProblemSpec& spec, int p, double lambda, Estimator estimator,
                          int reps, std::uint64_t seed, const FitOptions& opts = {});

// Batched variant: one dataset and one pair of gram matrices per
// replicate, reused across every (estimator, lambda) cell.
std::vector<std::vector<EmpiricalRisk>> monte_carlo_sweep(
    const ProblemSpec& spec, int p, const std::vector<Estimator>& estimators,
    const std::vector<double>& lambdas, int reps, std::uint64_t seed, const FitOptions& opts = {});

}  // namespace ampr
