#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ampr/dataset.hpp"
#include "ampr/problem.hpp"
#include "ampr/risk.hpp"

namespace ampr {

// AMP iterates live in sqrt(p)-scaled coordinates, matching the state
// evolution: beta entries are O(1) and (1/p)||beta - sqrt(p) beta_hat||^2
// is the per-coordinate squared distance to an estimator.
struct AmpState {
    Eigen::VectorXd beta;  // p-vector (sqrt(p) scale)
    Eigen::VectorXd r;     // n_w residual track
    double b = 0.0;        // Onsager scalar (c_t for the ridge recursion)
    int t = 0;
    double tau2_emp = 0.0;  // (1/p)||Sigma^{1/2}(arg - (1+b) beta0)||^2 of the producing step
};

struct AmpRun {
    std::vector<AmpState> states;
    bool diverged = false;
};

struct AmpInit {
    enum class Kind { Zero, Oracle, Custom };
    Kind kind = Kind::Zero;
    // Oracle: state-evolution fixed point used to synthesize beta^0
    ScalarSEFixedPoint fixed_point;
    std::uint64_t oracle_seed = 0;
    // Custom: beta^0 in sqrt(p) scale (e.g. sqrt(p) * convex solution)
    Eigen::VectorXd beta0;

    static AmpInit zero() { return {}; }
    static AmpInit oracle(const ScalarSEFixedPoint& fp, std::uint64_t seed = 0);
    static AmpInit custom(const Eigen::VectorXd& beta_scaled);
};

// Generalized AMP recursion for the reference-panel lasso; b_t follows the
// active-set divergence rule.
AmpRun run_ref_lasso_amp(const SyntheticDataset& data, double lambda, int t_max,
                         const AmpInit& init = {});

// Reference-panel ridge recursion; the denoiser is the spectral resolvent
// (I + lambda (1 + c_t) Sigma^{-1})^{-1} and c_t follows the exact trace rule.
AmpRun run_ref_ridge_amp(const SyntheticDataset& data, double lambda, int t_max,
                         const AmpInit& init = {});

// Solves c_{t+1} / (1 + c_t) = (1/n_w) tr[(I + lambda (1 + c_{t+1}) Sigma^{-1})^{-1}].
double ridge_c_next(const CovarianceModel& sigma, double lambda, double gamma_w, double c_prev);

// GOE(p): G + G^T with G_ij ~ N(0, 1/(2p)).
Eigen::MatrixXd sample_goe(int p, std::uint64_t seed);

// Symmetric non-separable matrix AMP: X^{t+1} = A m^t - m^{t-1} (B^t)^T
// with m^t = F^t(X^t) and B^t the coordinatewise-Jacobian average.
struct MatrixAmpProgram {
    Eigen::MatrixXd coupling;  // N' x N' symmetric
    int q = 1;
    Eigen::MatrixXd x0;  // N' x q
    // m^t = denoiser(t, X^t)
    std::function<Eigen::MatrixXd(int, const Eigen::MatrixXd&)> denoiser;
    // optional analytic q x q Onsager matrix; Hutchinson-estimated otherwise
    std::function<Eigen::MatrixXd(int, const Eigen::MatrixXd&)> onsager;
    int hutchinson_probes = 8;
    double hutchinson_step = 1e-5;
};

struct MatrixAmpRun {
    std::vector<Eigen::MatrixXd> iterates;  // X^0 ... X^t
    bool diverged = false;
};

MatrixAmpRun run_symmetric_matrix_amp(const MatrixAmpProgram& program, std::uint64_t seed, int t_max);

// Deterministic state-evolution trajectory (tau_t^2, b_t) with optional
// adjacent cross moments tau^2_{t,t+1}.
struct SETrajectory {
    std::vector<double> tau2;
    std::vector<double> b;
    std::vector<double> tau2_cross;  // tau2_cross[t] ~ E Z_t Z_{t+1}
};

SETrajectory se_recursion(const ProblemSpec& spec, double lambda, int t_max, double init_tau2,
                          double init_b = 0.0, bool with_cross_terms = false);

// CSV with columns t, tau2_emp, tau2_se, b_t, dist_to_estimator.
void export_trajectory_csv(const std::string& path, const AmpRun& run, const SETrajectory& se,
                           const Eigen::VectorXd* estimator_scaled = nullptr);

}  // namespace ampr
