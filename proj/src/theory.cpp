#include "ampr/theory.hpp"

#include <algorithm>
#include <cmath>

#include "ampr/brent.hpp"
#include "ampr/errors.hpp"
#include "ampr/ridge.hpp"

namespace ampr {

std::string to_string(Estimator e) {
    switch (e) {
        case Estimator::Lasso: return "lasso";
        case Estimator::RefLasso: return "ref_lasso";
        case Estimator::Ridge: return "ridge";
        case Estimator::RefRidge: return "ref_ridge";
    }
    return "unknown";
}

RiskReport theory_risk(const ProblemSpec& spec, Estimator estimator, double lambda,
                       const ScalarSolverOptions& opts) {
    switch (estimator) {
        case Estimator::Lasso: {
            const auto fp = solve_lasso_se(spec, lambda, opts);
            return lasso_risk(spec, lambda, fp, opts);
        }
        case Estimator::RefLasso: {
            const auto fp = solve_ref_lasso_se(spec, lambda, opts);
            return ref_lasso_risk(spec, lambda, fp, opts);
        }
        case Estimator::Ridge:
            return spec.covariance.is_identity() ? ridge_risk_iid(spec, lambda)
                                                 : throw OutOfRange("general-covariance traditional ridge is out of scope");
        case Estimator::RefRidge: {
            if (spec.covariance.is_identity()) return ref_ridge_risk_iid(spec, lambda);
            const auto fp = solve_ref_ridge_se_general(spec, lambda);
            return ref_ridge_risk_general(spec, lambda, fp);
        }
    }
    throw OutOfRange("unknown estimator");
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo && n >= 2)) throw OutOfRange("log_grid needs 0 < lo < hi, n >= 2");
    std::vector<double> g(n);
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[i] = lo * std::exp(step * i);
    return g;
}

std::pair<double, RiskReport> best_lambda(const ProblemSpec& spec, Estimator estimator,
                                          Objective objective, const std::vector<double>& grid,
                                          const ScalarSolverOptions& opts) {
    if (grid.empty()) throw OutOfRange("lambda grid must be nonempty");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw OutOfRange("lambda grid must be strictly increasing");

    auto score = [&](double lambda) {
        const RiskReport r = theory_risk(spec, estimator, lambda, opts);
        return objective == Objective::MinMSE ? r.mse : -r.r2;
    };

    size_t best = 0;
    double best_score = score(grid[0]);
    for (size_t i = 1; i < grid.size(); ++i) {
        const double s = score(grid[i]);
        // smallest lambda wins ties
        if (s < best_score - 1e-12) {
            best_score = s;
            best = i;
        }
    }

    // local golden-section refinement around the grid optimum
    const double lo = best > 0 ? grid[best - 1] : grid[best];
    const double hi = best + 1 < grid.size() ? grid[best + 1] : grid[best];
    double lambda_star = grid[best];
    if (hi > lo) {
        const double refined = golden_minimize([&](double l) { return score(std::exp(l)); },
                                               std::log(lo), std::log(hi), 1e-12);
        const double cand = std::exp(refined);
        if (score(cand) <= best_score) lambda_star = cand;
    }
    return {lambda_star, theory_risk(spec, estimator, lambda_star, opts)};
}

}  // namespace ampr
