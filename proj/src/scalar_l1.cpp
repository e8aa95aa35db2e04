#include "ampr/scalar_l1.hpp"

#include <cmath>
#include <map>

#include "ampr/brent.hpp"
#include "ampr/errors.hpp"
#include "ampr/soft_threshold.hpp"

namespace ampr {

namespace {

bool use_closed_form(const SignalPrior& prior, const ScalarSolverOptions& opts) {
    return prior.kind() == SignalPrior::Kind::BernoulliGaussian && !opts.force_quadrature;
}

const Quadrature& oracle_rule(const ScalarSolverOptions& opts) {
    // Composite rule: soft-threshold integrands have kinks that plain
    // Gauss-Hermite resolves only to ~1e-5.
    thread_local std::map<int, Quadrature> cache;
    auto it = cache.find(opts.quadrature_order);
    if (it == cache.end()) {
        const int panels = std::max(400, opts.quadrature_order * 4);
        it = cache.emplace(opts.quadrature_order, Quadrature::composite_normal(panels, 12, 10.0)).first;
    }
    return it->second;
}

}  // namespace

ScalarSEMoments ref_lasso_moments(const SignalPrior& prior, double zeta, double theta,
                                  const ScalarSolverOptions& opts) {
    ScalarSEMoments m;
    if (use_closed_form(prior, opts)) {
        const double kappa = prior.kappa();
        const double s2 = prior.sigma_beta2();
        const double slab_sd = std::sqrt(1.0 + zeta * zeta * s2);
        m.m2 = (1.0 - kappa) * gauss::soft_sq_moment(1.0, theta) +
               kappa * gauss::soft_sq_moment(slab_sd, theta);
        m.active = (1.0 - kappa) * gauss::active_probability(1.0, theta) +
                   kappa * gauss::active_probability(slab_sd, theta);
        // Stein: E eta(v, theta) beta = Cov(v, beta) P(|v| > theta), v = z + zeta beta
        m.cross = kappa * zeta * s2 * gauss::active_probability(slab_sd, theta);
        return m;
    }
    // Oracle path: the z axis is integrated analytically conditional on
    // beta_bar (noncentered Gaussian tail formulas), the prior axis by a
    // composite rule. Plain tensor rules stall near 1e-5 on the kinked or
    // steep conditional integrands, far short of the 1e-7 cross-checks.
    const Quadrature& q = oracle_rule(opts);
    m.m2 = expect_prior(
        prior, [&](double b) { return gauss::soft_sq_moment_nc(zeta * b, 1.0, theta); }, q);
    m.active = expect_prior(
        prior, [&](double b) { return gauss::active_probability_nc(zeta * b, 1.0, theta); }, q);
    m.cross = expect_prior(
        prior, [&](double b) { return b * gauss::soft_mean(zeta * b, 1.0, theta); }, q);
    return m;
}

LassoSEMoments lasso_moments(const SignalPrior& prior, double tau, double theta,
                             const ScalarSolverOptions& opts) {
    LassoSEMoments m;
    const double prior_m2 = prior.second_moment();
    if (use_closed_form(prior, opts)) {
        const double kappa = prior.kappa();
        const double s2 = prior.sigma_beta2();
        const double slab_sd = std::sqrt(tau * tau + s2);
        m.m2 = (1.0 - kappa) * gauss::soft_sq_moment(tau, theta) +
               kappa * gauss::soft_sq_moment(slab_sd, theta);
        m.active = (1.0 - kappa) * gauss::active_probability(tau, theta) +
                   kappa * gauss::active_probability(slab_sd, theta);
        m.cross = kappa * s2 * gauss::active_probability(slab_sd, theta);
    } else {
        const Quadrature& q = oracle_rule(opts);
        m.m2 = expect_prior(
            prior, [&](double b) { return gauss::soft_sq_moment_nc(b, tau, theta); }, q);
        m.active = expect_prior(
            prior, [&](double b) { return gauss::active_probability_nc(b, tau, theta); }, q);
        m.cross = expect_prior(
            prior, [&](double b) { return b * gauss::soft_mean(b, tau, theta); }, q);
    }
    m.mse = m.m2 - 2.0 * m.cross + prior_m2;
    return m;
}

double ref_lasso_f(const ProblemSpec& spec, double zeta, double alpha,
                   const ScalarSolverOptions& opts) {
    const double m2 = spec.prior.second_moment();
    const ScalarSEMoments mom = ref_lasso_moments(spec.prior, zeta, alpha, opts);
    return spec.gamma_x * zeta * zeta * m2 / spec.h2_x + spec.gamma_w * mom.m2;
}

double alpha_min_iid(const ProblemSpec& spec, const ScalarSolverOptions& opts) {
    if (spec.gamma_w <= 1.0) return 0.0;
    // g(alpha) = gamma_w E eta(z, alpha)^2 is strictly decreasing from
    // gamma_w > 1 to 0; the prior plays no role at zeta = 0
    auto g = [&](double a) { return spec.gamma_w * gauss::soft_sq_moment(1.0, a) - 1.0; };
    double hi = 1.0;
    int guard = 0;
    while (g(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw BracketFailure("alpha_min: no upper bracket");
    }
    return brent_root(g, 1e-12, hi, 1e-14);
}

namespace {

// Unique root of f(zeta, alpha) = 1 in zeta. Requires f(0, alpha) < 1.
double zeta_star_of_alpha(const ProblemSpec& spec, double alpha, const ScalarSolverOptions& opts) {
    auto f1 = [&](double z) { return ref_lasso_f(spec, z, alpha, opts) - 1.0; };
    if (f1(0.0) >= 0.0)
        throw InfeasibleRegime("f(0, alpha) >= 1: alpha at or below alpha_min for gamma_w > 1");
    double hi = 1.0;
    int doublings = 0;
    while (f1(hi) < 0.0) {
        hi *= 2.0;
        if (++doublings > 60) throw InfeasibleRegime("zeta bracket cap 2^60 exceeded");
    }
    return brent_root(f1, 0.0, hi, 1e-14);
}

struct AlphaSolution {
    double zeta;
    double draw;  // 1 - gamma_w E eta'(z + zeta beta, alpha), unclamped
};

AlphaSolution solve_at_alpha(const ProblemSpec& spec, double alpha, const ScalarSolverOptions& opts) {
    AlphaSolution s;
    s.zeta = zeta_star_of_alpha(spec, alpha, opts);
    const ScalarSEMoments mom = ref_lasso_moments(spec.prior, s.zeta, alpha, opts);
    s.draw = 1.0 - spec.gamma_w * mom.active;
    return s;
}

}  // namespace

double lambda_of_alpha_iid(const ProblemSpec& spec, double alpha, const ScalarSolverOptions& opts) {
    if (!(alpha > 0.0)) throw OutOfRange("alpha must be positive");
    const double amin = alpha_min_iid(spec, opts);
    if (spec.gamma_w > 1.0 && alpha <= amin)
        throw AlphaBelowMin("alpha <= alpha_min for gamma_w > 1");
    const AlphaSolution s = solve_at_alpha(spec, alpha, opts);
    if (s.draw <= 0.0) return 0.0;  // divergence clamp active
    // lambda = alpha tau_* / (1 + b_*) = alpha / zeta_*
    return alpha / s.zeta;
}

double alpha_of_lambda_iid(const ProblemSpec& spec, double lambda, const ScalarSolverOptions& opts) {
    if (!(lambda > 0.0)) throw OutOfRange("lambda must be positive");
    const double amin = alpha_min_iid(spec, opts);
    double lo = spec.gamma_w > 1.0 ? amin * (1.0 + 1e-9) + 1e-300 : 1e-12;
    auto h = [&](double a) { return lambda_of_alpha_iid(spec, a, opts) - lambda; };
    double hi = std::max(1.0, 2.0 * amin);
    int guard = 0;
    while (h(hi) < 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw BracketFailure("alpha_of_lambda: no upper bracket");
    }
    if (h(lo) > 0.0) throw BracketFailure("alpha_of_lambda: lower endpoint does not bracket");
    const double alpha = brent_root(h, lo, hi, 1e-14);
    // For gamma_w > 1 the calibration map jumps from 0 at the divergence
    // clamp; a small enough lambda has no preimage (the finite-p objective
    // is unbounded below there) and Brent lands on the jump.
    if (std::abs(lambda_of_alpha_iid(spec, alpha, opts) - lambda) > 1e-8 * std::max(1.0, lambda))
        throw InfeasibleRegime("lambda below the feasible range for gamma_w > 1");
    return alpha;
}

ScalarSEFixedPoint solve_ref_lasso_se(const ProblemSpec& spec, double lambda,
                                      const ScalarSolverOptions& opts) {
    if (!spec.covariance.is_identity())
        throw OutOfRange("scalar state evolution requires identity covariance");
    if (!(spec.gamma_w > 0.0)) throw OutOfRange("gamma_w must be positive");
    if (!(lambda > 0.0)) throw OutOfRange("lambda must be positive");

    const double alpha = alpha_of_lambda_iid(spec, lambda, opts);
    const AlphaSolution s = solve_at_alpha(spec, alpha, opts);
    if (s.draw <= 0.0) throw NoConvergence("divergence clamp active at calibrated alpha");

    ScalarSEFixedPoint fp;
    fp.zeta_star = s.zeta;
    fp.b_star = 1.0 / s.draw - 1.0;
    fp.tau_star = (1.0 + fp.b_star) / s.zeta;

    // residuals of the lambda-form fixed-point equations at the returned point
    const double theta = lambda * fp.zeta_star;
    const ScalarSEMoments mom = ref_lasso_moments(spec.prior, fp.zeta_star, theta, opts);
    const double m2 = spec.prior.second_moment();
    const double r1 = std::abs(spec.gamma_x * fp.zeta_star * fp.zeta_star * m2 / spec.h2_x +
                               spec.gamma_w * mom.m2 - 1.0);
    const double r2 =
        std::abs(fp.b_star / (1.0 + fp.b_star) - spec.gamma_w * mom.active);
    fp.residual = std::max(r1, r2);
    fp.iterations = 1;
    if (fp.residual > opts.residual_tol)
        throw NoConvergence("ref-lasso state evolution residual above tolerance");
    return fp;
}

RiskReport ref_lasso_risk(const ProblemSpec& spec, double lambda, const ScalarSEFixedPoint& fp,
                          const ScalarSolverOptions& opts) {
    const double theta = lambda * fp.zeta_star;
    const ScalarSEMoments mom = ref_lasso_moments(spec.prior, fp.zeta_star, theta, opts);
    const double m2 = spec.prior.second_moment();
    const double tau = fp.tau_star;

    RiskReport r;
    r.lambda = lambda;
    r.estimator = Estimator::RefLasso;
    r.fixed_point = fp;
    r.alpha = theta;
    // E [ tau eta(z + zeta beta, lambda zeta) - beta ]^2
    r.mse = tau * tau * mom.m2 - 2.0 * tau * mom.cross + m2;
    r.r2 = mom.m2 > 0.0 ? spec.h2_s * mom.cross * mom.cross / (m2 * mom.m2) : 0.0;
    return r;
}

ScalarSEFixedPoint solve_lasso_se(const ProblemSpec& spec, double lambda,
                                  const ScalarSolverOptions& opts) {
    if (!spec.covariance.is_identity())
        throw OutOfRange("scalar state evolution requires identity covariance");
    if (!(lambda > 0.0)) throw OutOfRange("lambda must be positive");

    const double m2 = spec.prior.second_moment();
    const double base = spec.gamma_x * m2 * (1.0 - spec.h2_x) / spec.h2_x;

    auto inner_tau = [&](double theta) {
        // first crossing of tau^2 = base + gamma_x E[eta(beta + tau z, theta) - beta]^2
        auto h = [&](double t) {
            return t * t - base - spec.gamma_x * lasso_moments(spec.prior, t, theta, opts).mse;
        };
        double lo = 1e-9;
        if (h(lo) >= 0.0) return lo;
        double prev = lo;
        for (double t = 1e-6; t < 1e9; t *= 1.5) {
            if (h(t) >= 0.0) return brent_root(h, prev, t, 1e-14);
            prev = t;
        }
        throw NoConvergence("lasso state evolution: no tau bracket found");
    };

    // damped iteration on u = 1/(1 + b)
    double u = 1.0;
    double tau = 0.0;
    int iter = 0;
    for (; iter < opts.max_outer; ++iter) {
        const double theta = lambda / u;
        tau = inner_tau(theta);
        const double active = lasso_moments(spec.prior, tau, theta, opts).active;
        double u_target = 1.0 - spec.gamma_x * active;
        if (u_target < 1e-10) u_target = 1e-10;
        if (std::abs(u_target - u) < opts.tol) {
            u = u_target;
            break;
        }
        u += 0.5 * (u_target - u);
    }
    if (iter >= opts.max_outer)
        throw NoConvergence("lasso state evolution: outer iteration cap reached");

    ScalarSEFixedPoint fp;
    fp.b_star = 1.0 / u - 1.0;
    const double theta = lambda * (1.0 + fp.b_star);
    fp.tau_star = inner_tau(theta);
    fp.zeta_star = (1.0 + fp.b_star) / fp.tau_star;
    fp.iterations = iter + 1;

    const LassoSEMoments mom = lasso_moments(spec.prior, fp.tau_star, theta, opts);
    const double r1 = std::abs(fp.tau_star * fp.tau_star - base - spec.gamma_x * mom.mse);
    const double r2 = std::abs(u - (1.0 - spec.gamma_x * mom.active));
    fp.residual = std::max(r1, r2);
    if (fp.residual > opts.residual_tol)
        throw NoConvergence("lasso state evolution residual above tolerance");
    return fp;
}

RiskReport lasso_risk(const ProblemSpec& spec, double lambda, const ScalarSEFixedPoint& fp,
                      const ScalarSolverOptions& opts) {
    const double m2 = spec.prior.second_moment();
    const double theta = lambda * (1.0 + fp.b_star);
    const LassoSEMoments mom = lasso_moments(spec.prior, fp.tau_star, theta, opts);

    RiskReport r;
    r.lambda = lambda;
    r.estimator = Estimator::Lasso;
    r.fixed_point = fp;
    r.alpha = theta / fp.tau_star;
    r.mse = fp.tau_star * fp.tau_star / spec.gamma_x - m2 * (1.0 - spec.h2_x) / spec.h2_x;
    r.r2 = mom.m2 > 0.0 ? spec.h2_s * mom.cross * mom.cross / (m2 * mom.m2) : 0.0;
    return r;
}

}  // namespace ampr
