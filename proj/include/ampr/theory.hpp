#pragma once

#include <utility>
#include <vector>

#include "ampr/problem.hpp"
#include "ampr/risk.hpp"
#include "ampr/scalar_l1.hpp"

namespace ampr {

enum class Objective { MinMSE, MaxR2 };

// Asymptotic risk of the requested estimator at Sigma = I.
RiskReport theory_risk(const ProblemSpec& spec, Estimator estimator, double lambda,
                       const ScalarSolverOptions& opts = {});

// Grid search with a golden-section refinement around the grid optimum.
// Ties resolve to the smallest lambda (within 1e-12).
std::pair<double, RiskReport> best_lambda(const ProblemSpec& spec, Estimator estimator,
                                          Objective objective, const std::vector<double>& grid,
                                          const ScalarSolverOptions& opts = {});

std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace ampr
