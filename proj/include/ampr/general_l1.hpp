#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/Dense>

#include "ampr/problem.hpp"
#include "ampr/risk.hpp"

namespace ampr {

// Converged general-covariance L1 state evolution. Expectations are
// Monte Carlo estimates over a fixed common-random-numbers sample, so the
// fixed point is deterministic given (p_mc, reps, seed).
struct GeneralSEFixedPoint {
    double tau_star = 0.0;
    double b_star = 0.0;
    double alpha = 0.0;
    double lambda = 0.0;
    int p_mc = 0;
    int reps = 0;
    std::uint64_t seed = 0;
    double residual = 0.0;
};

struct GeneralSEOptions {
    int p_mc = 400;
    int reps = 100;
    std::uint64_t seed = 1;
    double root_tol = 1e-12;
    double residual_tol = 1e-8;
};

// Fixed (Z, beta0) sample shared by every expectation of one solve;
// replicate solves run in parallel, aggregation order is fixed.
class McSample {
public:
    McSample(const ProblemSpec& spec, const GeneralSEOptions& opts);

    // (gamma_w / p) mean_r || eta_alpha(Sigma^{-1/2} Z_r + zeta B_r) ||_Sigma^2
    double prox_energy(double zeta, double alpha) const;
    // (gamma_w / p) mean_r |active set|
    double prox_divergence(double zeta, double alpha) const;
    // both at once (one prox solve per replicate)
    void prox_moments(double zeta, double alpha, double& energy, double& divergence) const;

    // per-replicate energies, for standard-error estimates
    Eigen::VectorXd prox_energy_samples(double zeta, double alpha) const;

    const CovarianceModel& covariance() const { return cov_; }
    const ProblemSpec& spec() const { return spec_; }
    int p_mc() const { return opts_.p_mc; }
    int reps() const { return opts_.reps; }
    std::uint64_t seed() const { return opts_.seed; }

    const Eigen::MatrixXd& whitened_noise() const { return whitened_noise_; }
    const Eigen::MatrixXd& signals() const { return signals_; }

private:
    ProblemSpec spec_;
    GeneralSEOptions opts_;
    CovarianceModel cov_;
    Eigen::MatrixXd whitened_noise_;  // Sigma^{-1/2} Z, one column per replicate
    Eigen::MatrixXd signals_;         // beta0 draws, one column per replicate
};

// g(alpha) = lim (1/n_w) E || eta_alpha(Sigma^{-1/2} Z) ||_Sigma^2 estimated
// on the fixed sample; strictly decreasing in alpha.
double g_hat(const McSample& sample, double alpha);

// Root of g(alpha) = 1 for gamma_w > 1; 0 by convention otherwise.
double alpha_min(const ProblemSpec& spec, const GeneralSEOptions& opts = {});
double alpha_min(const McSample& sample);

// lambda(alpha) = alpha tau_* [1 - (1/n_w) E Div eta]; returns 0 where the
// divergence clamp is active (alpha near alpha_min).
double lambda_of_alpha(const McSample& sample, double alpha);
double lambda_of_alpha(const ProblemSpec& spec, double alpha, const GeneralSEOptions& opts = {});

// Inverse map by bracketed root finding (lambda(alpha) is nondecreasing).
double calibrate_alpha(const McSample& sample, double lambda);
double calibrate_alpha(const ProblemSpec& spec, double lambda, const GeneralSEOptions& opts = {});

GeneralSEFixedPoint solve_general_l1_se(const ProblemSpec& spec, double lambda,
                                        const GeneralSEOptions& opts = {});

struct GeneralL1Risk {
    double lambda = 0.0;
    double alpha = 0.0;
    double mse = 0.0;
    double mse_se = 0.0;
    double r2 = 0.0;
    double r2_se = 0.0;
};

GeneralL1Risk general_l1_risk(const ProblemSpec& spec, double lambda, const GeneralSEFixedPoint& fp,
                              const GeneralSEOptions& opts = {});

}  // namespace ampr
