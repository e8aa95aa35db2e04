#pragma once

#include <vector>

#include "ampr/problem.hpp"
#include "ampr/risk.hpp"

namespace ampr {

// Closed-form c_* of the reference-panel ridge state evolution at Sigma = I.
double ref_ridge_c_star_iid(double lambda, double gamma_w);

// Reference-panel ridge risk at Sigma = I (closed forms).
RiskReport ref_ridge_risk_iid(const ProblemSpec& spec, double lambda);

// Traditional ridge risk at Sigma = I (closed forms); the out-of-sample
// R^2 is maximized at lambda = gamma_x (1 - h2_x) / h2_x.
RiskReport ridge_risk_iid(const ProblemSpec& spec, double lambda);
double ridge_optimal_lambda(const ProblemSpec& spec);

// | 1/(1 - b_w') - [1 - 4 gamma_w / (1 + lambda + gamma_w + sqrt((1 -
// lambda - gamma_w)^2 + 4 lambda))^2] |: the AMP and random-matrix
// routes to the same quantity, identical in exact arithmetic.
double rmt_equivalence_gap(double lambda, double gamma_w);

// General-covariance reference-panel ridge state evolution, evaluated
// spectrally. c_* solves the rho-free trace equation; rho_*^2 then follows
// from a linear equation.
RidgeFixedPoint solve_ref_ridge_se_general(const ProblemSpec& spec, double lambda);
RiskReport ref_ridge_risk_general(const ProblemSpec& spec, double lambda, const RidgeFixedPoint& fp);

struct OrderingReport {
    double min_mse_ref = 0.0;
    double min_mse_traditional = 0.0;
    double max_r2_ref = 0.0;
    double max_r2_traditional = 0.0;
    double mse_gap() const { return min_mse_ref - min_mse_traditional; }
    double r2_gap() const { return max_r2_ref - max_r2_traditional; }
};

// Compares min_lambda MSE and max_lambda R^2 of the reference-panel and
// traditional ridge estimators over a refined lambda grid; requires
// gamma_x == gamma_w.
OrderingReport ridge_ordering_check(const ProblemSpec& spec, const std::vector<double>& lambda_grid);

}  // namespace ampr
