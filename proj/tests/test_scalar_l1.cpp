#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ampr/errors.hpp"
#include "ampr/scalar_l1.hpp"
#include "ampr/soft_threshold.hpp"
#include "ampr/theory.hpp"

using namespace ampr;

namespace {

ProblemSpec make_spec(double gamma_x, double gamma_w, double h2, double kappa,
                      double sigma_beta2 = 1.0) {
    ProblemSpec spec;
    spec.gamma_x = gamma_x;
    spec.gamma_w = gamma_w;
    spec.gamma_s = gamma_x;
    spec.h2_x = h2;
    spec.h2_s = h2;
    spec.prior = SignalPrior::bernoulli_gaussian(kappa, sigma_beta2);
    spec.covariance = CovarianceModel::identity(1);
    return spec;
}

}  // namespace

TEST_CASE("ref-lasso state evolution: large-lambda limit") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    const auto fp = solve_ref_lasso_se(spec, 1e8);
    // thresholding kills all mass: zeta^2 -> h^2 / (gamma_x kappa sigma^2)
    const double zeta2_limit = spec.h2_x / (spec.gamma_x * 0.05);
    CHECK(fp.zeta_star * fp.zeta_star == doctest::Approx(zeta2_limit).epsilon(1e-6));
    CHECK(std::abs(fp.b_star) < 1e-8);
    CHECK(fp.residual < 1e-9);
    CHECK(fp.tau_star == doctest::Approx((1.0 + fp.b_star) / fp.zeta_star).epsilon(1e-12));
}

TEST_CASE("ref-lasso state evolution: residual is a defining property") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    for (double lambda : {0.05, 0.1, 0.5, 2.0}) {
        const auto fp = solve_ref_lasso_se(spec, lambda);
        CHECK(fp.residual < 1e-9);
        // plug back manually
        const double theta = lambda * fp.zeta_star;
        const auto mom = ref_lasso_moments(spec.prior, fp.zeta_star, theta);
        const double lhs = spec.gamma_x * fp.zeta_star * fp.zeta_star * 0.05 / spec.h2_x +
                           spec.gamma_w * mom.m2;
        CHECK(std::abs(lhs - 1.0) < 1e-9);
        CHECK(std::abs(fp.b_star / (1.0 + fp.b_star) - spec.gamma_w * mom.active) < 1e-9);
    }
}

TEST_CASE("ref-lasso closed form agrees with the quadrature oracle") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    ScalarSolverOptions quad_opts;
    quad_opts.force_quadrature = true;

    const auto closed = solve_ref_lasso_se(spec, 0.1);
    const auto oracle = solve_ref_lasso_se(spec, 0.1, quad_opts);
    CHECK(closed.zeta_star == doctest::Approx(oracle.zeta_star).epsilon(1e-7));
    CHECK(closed.b_star == doctest::Approx(oracle.b_star).epsilon(1e-7));

    const auto risk_closed = ref_lasso_risk(spec, 0.1, closed);
    const auto risk_oracle = ref_lasso_risk(spec, 0.1, oracle, quad_opts);
    CHECK(risk_closed.mse == doctest::Approx(risk_oracle.mse).epsilon(1e-7));
    CHECK(risk_closed.r2 == doctest::Approx(risk_oracle.r2).epsilon(1e-7));
}

TEST_CASE("ref-lasso risk: limits and oracle agreement") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    {
        const auto fp = solve_ref_lasso_se(spec, 1e8);
        const auto risk = ref_lasso_risk(spec, 1e8, fp);
        CHECK(risk.mse == doctest::Approx(0.05).epsilon(1e-6));  // estimator shrinks to zero
        CHECK(risk.r2 < 1e-10);
    }
    {
        const double lambda = 0.3;
        const auto fp = solve_ref_lasso_se(spec, lambda);
        const auto risk = ref_lasso_risk(spec, lambda, fp);
        // direct quadrature of E[eta(tau z + (1+b) beta, lambda (1+b)) - beta]^2
        const Quadrature q = Quadrature::composite_normal();
        const double theta = lambda * (1.0 + fp.b_star);
        const double direct = expect_2d(spec.prior, q, [&](double z, double b) {
            const double e = soft_threshold(fp.tau_star * z + (1.0 + fp.b_star) * b, theta) - b;
            return e * e;
        });
        CHECK(risk.mse == doctest::Approx(direct).epsilon(1e-7));
    }
}

TEST_CASE("lasso state evolution: large-lambda limit and residuals") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    const auto fp = solve_lasso_se(spec, 1e8);
    CHECK(fp.tau_star * fp.tau_star ==
          doctest::Approx(spec.gamma_x * 0.05 / spec.h2_x).epsilon(1e-6));
    CHECK(std::abs(fp.b_star) < 1e-8);
    CHECK(fp.residual < 1e-9);

    for (double lambda : {0.05, 0.5, 2.0}) {
        const auto f = solve_lasso_se(spec, lambda);
        CHECK(f.residual < 1e-9);
    }
}

TEST_CASE("lasso closed form agrees with the quadrature oracle on a grid") {
    ScalarSolverOptions quad_opts;
    quad_opts.force_quadrature = true;
    const double grid[][3] = {{0.5, 0.6, 0.05}, {0.25, 0.3, 0.2}, {1.0, 0.8, 0.01}};
    for (const auto& g : grid) {
        const ProblemSpec spec = make_spec(g[0], g[0], g[1], g[2]);
        const auto closed = solve_lasso_se(spec, 0.4);
        const auto oracle = solve_lasso_se(spec, 0.4, quad_opts);
        CHECK(closed.tau_star == doctest::Approx(oracle.tau_star).epsilon(1e-7));
        CHECK(closed.b_star == doctest::Approx(oracle.b_star).epsilon(2e-7));
    }
}

TEST_CASE("lasso risk: limits, positivity, and consistency") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    {
        const auto fp = solve_lasso_se(spec, 1e8);
        const auto risk = lasso_risk(spec, 1e8, fp);
        CHECK(risk.mse == doctest::Approx(0.05).epsilon(1e-6));
        CHECK(risk.r2 < 1e-10);
    }
    for (double lambda : log_grid(1e-3, 1e3, 13)) {
        const auto fp = solve_lasso_se(spec, lambda);
        const auto risk = lasso_risk(spec, lambda, fp);
        CHECK(risk.mse >= 0.0);
        CHECK(risk.r2 >= 0.0);
        CHECK(risk.r2 <= spec.h2_s + 1e-10);
        // tau^2/gamma - noise equals the direct expectation at the fixed point
        const double theta = lambda * (1.0 + fp.b_star);
        const auto mom = lasso_moments(spec.prior, fp.tau_star, theta);
        CHECK(risk.mse == doctest::Approx(mom.mse).epsilon(1e-7));
    }
}

TEST_CASE("risk curves decay toward zero R^2 as lambda grows") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    double prev_ref = 1.0, prev_lasso = 1.0;
    for (double lambda : {1.0, 4.0, 16.0, 64.0}) {
        const auto ref = ref_lasso_risk(spec, lambda, solve_ref_lasso_se(spec, lambda));
        const auto las = lasso_risk(spec, lambda, solve_lasso_se(spec, lambda));
        CHECK(ref.r2 < prev_ref);
        CHECK(las.r2 < prev_lasso);
        prev_ref = ref.r2;
        prev_lasso = las.r2;
    }
}

TEST_CASE("zeta bracket endpoints behave as the solver assumes") {
    const ProblemSpec spec = make_spec(0.5, 2.0, 0.6, 0.05);  // gamma_w > 1
    const double amin = alpha_min_iid(spec);
    CHECK(amin > 0.0);
    const double alpha = 2.0 * amin;
    CHECK(ref_lasso_f(spec, 0.0, alpha) < 1.0);
    double hi = 1.0;
    while (ref_lasso_f(spec, hi, alpha) < 1.0) hi *= 2.0;
    CHECK(ref_lasso_f(spec, hi, alpha) > 1.0);

    const ProblemSpec easy = make_spec(0.5, 0.5, 0.6, 0.05);
    CHECK(alpha_min_iid(easy) == 0.0);
}

TEST_CASE("gamma_w <= 0 is rejected") {
    ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    spec.gamma_w = 0.0;
    CHECK_THROWS(solve_ref_lasso_se(spec, 0.5));
}

TEST_CASE("scalar calibration round trip") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    for (double lambda : {0.05, 0.5, 5.0}) {
        const double alpha = alpha_of_lambda_iid(spec, lambda);
        CHECK(std::abs(lambda_of_alpha_iid(spec, alpha) - lambda) < 1e-6);
        // alpha tau / (1 + b) = lambda at the fixed point
        const auto fp = solve_ref_lasso_se(spec, lambda);
        CHECK(alpha * fp.tau_star / (1.0 + fp.b_star) == doctest::Approx(lambda).epsilon(1e-8));
    }
    // gamma_w > 1 also round-trips above the feasibility threshold
    const ProblemSpec hard = make_spec(0.5, 2.0, 0.6, 0.05);
    for (double lambda : {0.5, 1.0}) {
        const double alpha = alpha_of_lambda_iid(hard, lambda);
        CHECK(alpha > alpha_min_iid(hard));
        CHECK(std::abs(lambda_of_alpha_iid(hard, alpha) - lambda) < 1e-6);
    }
    // below the divergence clamp the objective is unbounded: no calibration
    CHECK_THROWS_AS(alpha_of_lambda_iid(hard, 0.05), InfeasibleRegime);
}

TEST_CASE("best_lambda: argmax properties") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    const auto grid = log_grid(1e-3, 1e3, 40);
    const auto [lam, report] = best_lambda(spec, Estimator::RefLasso, Objective::MaxR2, grid);
    CHECK(lam < grid.back());  // right endpoint is never optimal for R^2
    CHECK(report.r2 >= ref_lasso_risk(spec, grid[0], solve_ref_lasso_se(spec, grid[0])).r2);

    // the same grid again yields the same optimum
    std::vector<double> again(grid.begin(), grid.end());
    const auto [lam2, r2] = best_lambda(spec, Estimator::RefLasso, Objective::MaxR2, again);
    CHECK(lam == doctest::Approx(lam2).epsilon(1e-12));

    CHECK_THROWS_AS(best_lambda(spec, Estimator::RefLasso, Objective::MaxR2, {}), OutOfRange);
}

TEST_CASE("reference panel costs accuracy at matched sample sizes") {
    // numeric form of the optimal-tuning comparison at gamma_x = gamma_w
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.005);
    const auto grid = log_grid(1e-3, 1e2, 60);
    const auto lasso = best_lambda(spec, Estimator::Lasso, Objective::MaxR2, grid);
    const auto ref = best_lambda(spec, Estimator::RefLasso, Objective::MaxR2, grid);
    CHECK(lasso.second.r2 > ref.second.r2);

    const auto lasso_mse = best_lambda(spec, Estimator::Lasso, Objective::MinMSE, grid);
    const auto ref_mse = best_lambda(spec, Estimator::RefLasso, Objective::MinMSE, grid);
    CHECK(ref_mse.second.mse > lasso_mse.second.mse);
}

TEST_CASE("generic priors take the quadrature path end to end") {
    ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    spec.prior = SignalPrior::discrete_mixture({{-1.0, 0.3}, {0.0, 0.4}, {1.0, 0.3}});
    const auto fp = solve_ref_lasso_se(spec, 0.5);
    CHECK(fp.residual < 1e-9);
    const auto risk = ref_lasso_risk(spec, 0.5, fp);
    CHECK(risk.mse > 0.0);
    CHECK(risk.r2 > 0.0);
    CHECK(risk.r2 <= spec.h2_s);
}
