#pragma once

#include "ampr/problem.hpp"
#include "ampr/quadrature.hpp"
#include "ampr/risk.hpp"

namespace ampr {

struct ScalarSolverOptions {
    double tol = 1e-10;       // fixed-point iteration tolerance
    double residual_tol = 1e-9;
    int max_outer = 500;
    // Bernoulli-Gaussian priors use the erf closed forms; setting this
    // forces the quadrature path (also used for generic priors).
    bool force_quadrature = false;
    int quadrature_order = 96;
};

// Scalar moments of the rescaled reference-panel state evolution at
// Sigma = I: v = z + zeta * beta_bar, threshold theta.
// m2 = E eta(v, theta)^2, active = P(|v| > theta), cross = E eta(v, theta) beta_bar.
struct ScalarSEMoments {
    double m2 = 0.0;
    double active = 0.0;
    double cross = 0.0;
};

ScalarSEMoments ref_lasso_moments(const SignalPrior& prior, double zeta, double theta,
                                  const ScalarSolverOptions& opts = {});

// Moments of the plain-lasso state evolution: v = beta_bar + tau * z.
// mse = E [eta(v, theta) - beta_bar]^2 is carried alongside.
struct LassoSEMoments {
    double m2 = 0.0;
    double active = 0.0;
    double cross = 0.0;
    double mse = 0.0;
};

LassoSEMoments lasso_moments(const SignalPrior& prior, double tau, double theta,
                             const ScalarSolverOptions& opts = {});

// f(zeta, alpha) of the normalized fixed-point equation at Sigma = I;
// the state evolution solves f(zeta_*, alpha) = 1.
double ref_lasso_f(const ProblemSpec& spec, double zeta, double alpha,
                   const ScalarSolverOptions& opts = {});

// Threshold scale below which f(0, alpha) >= 1 when gamma_w > 1;
// 0 by convention for gamma_w <= 1.
double alpha_min_iid(const ProblemSpec& spec, const ScalarSolverOptions& opts = {});

// lambda(alpha) calibration map and its inverse at Sigma = I.
// lambda_of_alpha_iid returns 0 where the divergence clamp is active.
double lambda_of_alpha_iid(const ProblemSpec& spec, double alpha,
                           const ScalarSolverOptions& opts = {});
double alpha_of_lambda_iid(const ProblemSpec& spec, double lambda,
                           const ScalarSolverOptions& opts = {});

// Reference-panel lasso state evolution (Sigma = I).
ScalarSEFixedPoint solve_ref_lasso_se(const ProblemSpec& spec, double lambda,
                                      const ScalarSolverOptions& opts = {});
RiskReport ref_lasso_risk(const ProblemSpec& spec, double lambda, const ScalarSEFixedPoint& fp,
                          const ScalarSolverOptions& opts = {});

// Traditional lasso state evolution (Sigma = I).
ScalarSEFixedPoint solve_lasso_se(const ProblemSpec& spec, double lambda,
                                  const ScalarSolverOptions& opts = {});
RiskReport lasso_risk(const ProblemSpec& spec, double lambda, const ScalarSEFixedPoint& fp,
                      const ScalarSolverOptions& opts = {});

}  // namespace ampr
