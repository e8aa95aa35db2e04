#pragma once

#include <optional>
#include <string>

namespace ampr {

enum class Estimator { Lasso, RefLasso, Ridge, RefRidge };

std::string to_string(Estimator e);

// Converged scalar state-evolution pair. zeta = (1 + b) / tau.
struct ScalarSEFixedPoint {
    double zeta_star = 0.0;
    double b_star = 0.0;
    double tau_star = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

struct RidgeFixedPoint {
    double rho_star = 0.0;
    double c_star = 0.0;
    double lambda = 0.0;
};

struct RiskReport {
    double lambda = 0.0;
    double mse = 0.0;
    double r2 = 0.0;
    Estimator estimator = Estimator::Lasso;
    std::optional<ScalarSEFixedPoint> fixed_point;
    std::optional<RidgeFixedPoint> ridge_fixed_point;
    // internal threshold scale alpha = lambda (1 + b*) / tau* where defined
    double alpha = 0.0;
};

}  // namespace ampr
