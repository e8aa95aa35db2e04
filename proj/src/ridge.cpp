#include "ampr/ridge.hpp"

#include <cmath>

#include "ampr/brent.hpp"
#include "ampr/errors.hpp"
#include "ampr/theory.hpp"

namespace ampr {

namespace {

constexpr double kMinLambda = 1e-8;  // W^T W / n_w is singular at lambda = 0 when gamma_w > 1

double disc(double lambda, double gamma) {
    const double d = 1.0 - lambda - gamma;
    return std::sqrt(d * d + 4.0 * lambda);
}

void check_lambda(double lambda) {
    if (!(lambda >= kMinLambda)) throw OutOfRange("ridge lambda must be at least 1e-8");
}

}  // namespace

double ref_ridge_c_star_iid(double lambda, double gamma_w) {
    return (-(1.0 + lambda - gamma_w) + disc(lambda, gamma_w)) / (2.0 * lambda);
}

RiskReport ref_ridge_risk_iid(const ProblemSpec& spec, double lambda) {
    check_lambda(lambda);
    const double gx = spec.gamma_x;
    const double gw = spec.gamma_w;
    const double h2x = spec.h2_x;
    const double h2s = spec.h2_s;
    const double m2 = spec.prior.second_moment();

    const double c = ref_ridge_c_star_iid(lambda, gw);
    const double denom = 1.0 + lambda * (1.0 + c);
    const double gw_frac = gw / (denom * denom);

    // rho_*^2 / (1 + c_*)^2 from the linearized state evolution
    const double theta2 = (gx * m2 / h2x + gw_frac * m2) / (1.0 - gw_frac);
    const double rho2 = theta2 * (1.0 + c) * (1.0 + c);

    RiskReport r;
    r.lambda = lambda;
    r.estimator = Estimator::RefRidge;
    r.ridge_fixed_point = RidgeFixedPoint{std::sqrt(rho2), c, lambda};
    r.mse = rho2 / (denom * denom) + std::pow((1.0 + c) / denom - 1.0, 2) * m2;
    // h_s^2 enters only through the test-response variance; the remaining
    // structure is driven by the training heritability
    r.r2 = h2s * h2x / (gx + h2x) * (1.0 - gw_frac);
    return r;
}

double ridge_optimal_lambda(const ProblemSpec& spec) {
    return spec.gamma_x * (1.0 - spec.h2_x) / spec.h2_x;
}

RiskReport ridge_risk_iid(const ProblemSpec& spec, double lambda) {
    check_lambda(lambda);
    const double gx = spec.gamma_x;
    const double h2x = spec.h2_x;
    const double h2s = spec.h2_s;
    const double m2 = spec.prior.second_moment();

    const double dd = disc(lambda, gx);
    const double big = 1.0 + lambda + gx + dd;
    const double c = 4.0 * gx / big;

    RiskReport r;
    r.lambda = lambda;
    r.estimator = Estimator::Ridge;
    r.r2 = (h2s / h2x) * h2x * h2x / ((1.0 - c) * h2x + gx) * (1.0 - 4.0 * gx / (big * big));
    r.mse = m2 * ((gx + 1.0) * lambda + (gx - 1.0) * (gx - 1.0) + (gx - 1.0) * dd) / (2.0 * gx * dd) +
            m2 * (1.0 - h2x) / h2x * (1.0 + gx + lambda - dd) / (2.0 * dd);
    return r;
}

double rmt_equivalence_gap(double lambda, double gamma_w) {
    if (!(lambda > 0.0 && gamma_w > 0.0)) throw OutOfRange("lambda and gamma_w must be positive");
    const double dd = disc(lambda, gamma_w);
    const double bw = (-(lambda + gamma_w - 1.0) + dd) / 2.0;
    const double bwp = -gamma_w * bw / (gamma_w * lambda + (bw + lambda) * (bw + lambda));
    const double amp = 1.0 - 4.0 * gamma_w / std::pow(1.0 + lambda + gamma_w + dd, 2);
    return std::abs(1.0 / (1.0 - bwp) - amp);
}

RidgeFixedPoint solve_ref_ridge_se_general(const ProblemSpec& spec, double lambda) {
    check_lambda(lambda);
    const auto& evals = spec.covariance.eigenvalues();
    const double p = static_cast<double>(evals.size());
    const double gw = spec.gamma_w;
    const double gx = spec.gamma_x;
    const double m2 = spec.prior.second_moment();

    // c = (1 + c) (1/n_w) sum_i s_i / (s_i + lambda (1 + c)); the right side
    // grows sublinearly in c so a single bracketed root suffices
    auto g2_gap = [&](double c) {
        const double theta = lambda * (1.0 + c);
        double trace = 0.0;
        for (int i = 0; i < evals.size(); ++i) trace += evals[i] / (evals[i] + theta);
        return c - (1.0 + c) * (gw / p) * trace;
    };
    double hi = 1.0;
    int guard = 0;
    while (g2_gap(hi) < 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw NoConvergence("ref-ridge c bracket failed");
    }
    const double c = brent_root(g2_gap, 0.0, hi, 1e-15);

    const double theta = lambda * (1.0 + c);
    double a = 0.0, q = 0.0, sbar = 0.0;
    for (int i = 0; i < evals.size(); ++i) {
        const double s = evals[i];
        const double frac = s / (s + theta);
        a += frac * frac;
        q += s * frac * frac;
        sbar += s;
    }
    a /= p;
    q = q * m2 / p;
    sbar /= p;

    const double denom = 1.0 - gw * a;
    if (denom <= 0.0) throw NonPositiveRho("1 - gamma_w a <= 0 in ridge state evolution");
    const double onec2 = (1.0 + c) * (1.0 + c);
    const double rho2 = (gw * onec2 * q + gx * onec2 * m2 * sbar / spec.h2_x) / denom;

    return RidgeFixedPoint{std::sqrt(rho2), c, lambda};
}

RiskReport ref_ridge_risk_general(const ProblemSpec& spec, double lambda, const RidgeFixedPoint& fp) {
    const auto& evals = spec.covariance.eigenvalues();
    const double p = static_cast<double>(evals.size());
    const double m2 = spec.prior.second_moment();
    const double c = fp.c_star;
    const double rho2 = fp.rho_star * fp.rho_star;
    const double theta = lambda * (1.0 + c);

    double a = 0.0, q = 0.0, u = 0.0, sbar = 0.0, bias = 0.0;
    for (int i = 0; i < evals.size(); ++i) {
        const double s = evals[i];
        const double frac = s / (s + theta);
        a += frac * frac;
        q += s * frac * frac;
        u += s * frac;
        sbar += s;
        const double shrink = (1.0 + c) * frac - 1.0;
        bias += s * shrink * shrink;
    }
    a /= p;
    q = q * m2 / p;
    u = u * m2 / p;
    sbar /= p;
    bias = bias * m2 / p;

    RiskReport r;
    r.lambda = lambda;
    r.estimator = Estimator::RefRidge;
    r.ridge_fixed_point = fp;
    r.mse = rho2 * a + bias;
    const double onec2 = (1.0 + c) * (1.0 + c);
    const double denom = m2 * sbar * (rho2 * a + onec2 * q);
    r.r2 = denom > 0.0 ? spec.h2_s * onec2 * u * u / denom : 0.0;
    return r;
}

OrderingReport ridge_ordering_check(const ProblemSpec& spec, const std::vector<double>& lambda_grid) {
    if (std::abs(spec.gamma_x - spec.gamma_w) > 1e-12)
        throw OutOfRange("ridge ordering comparison requires gamma_x == gamma_w");
    OrderingReport rep;
    auto ref_mse = best_lambda(spec, Estimator::RefRidge, Objective::MinMSE, lambda_grid);
    auto trad_mse = best_lambda(spec, Estimator::Ridge, Objective::MinMSE, lambda_grid);
    auto ref_r2 = best_lambda(spec, Estimator::RefRidge, Objective::MaxR2, lambda_grid);
    auto trad_r2 = best_lambda(spec, Estimator::Ridge, Objective::MaxR2, lambda_grid);
    rep.min_mse_ref = ref_mse.second.mse;
    rep.min_mse_traditional = trad_mse.second.mse;
    rep.max_r2_ref = ref_r2.second.r2;
    rep.max_r2_traditional = trad_r2.second.r2;
    return rep;
}

}  // namespace ampr
