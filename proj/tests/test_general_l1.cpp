#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ampr/general_l1.hpp"
#include "ampr/scalar_l1.hpp"

using namespace ampr;

namespace {

ProblemSpec make_spec(double gamma_x, double gamma_w, double h2, double kappa) {
    ProblemSpec spec;
    spec.gamma_x = gamma_x;
    spec.gamma_w = gamma_w;
    spec.gamma_s = gamma_x;
    spec.h2_x = h2;
    spec.h2_s = h2;
    spec.prior = SignalPrior::bernoulli_gaussian(kappa, 1.0);
    spec.covariance = CovarianceModel::identity(1);
    return spec;
}

double sd_of(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / (xs.size() - 1.0));
}

}  // namespace

TEST_CASE("identity covariance agrees with the scalar closed form within MC error") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    const double lambda = 0.3;
    const auto scalar = solve_ref_lasso_se(spec, lambda);

    std::vector<double> zetas, bs;
    GeneralSEOptions opts;
    opts.p_mc = 200;
    opts.reps = 40;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        opts.seed = seed;
        const auto fp = solve_general_l1_se(spec, lambda, opts);
        zetas.push_back((1.0 + fp.b_star) / fp.tau_star);
        bs.push_back(fp.b_star);
    }
    double zeta_mean = 0.0, b_mean = 0.0;
    for (size_t i = 0; i < zetas.size(); ++i) {
        zeta_mean += zetas[i];
        b_mean += bs[i];
    }
    zeta_mean /= zetas.size();
    b_mean /= bs.size();
    const double zeta_se = sd_of(zetas) / std::sqrt(double(zetas.size()));
    const double b_se = sd_of(bs) / std::sqrt(double(bs.size()));
    CHECK(std::abs(zeta_mean - scalar.zeta_star) < 3.0 * zeta_se + 1e-4);
    CHECK(std::abs(b_mean - scalar.b_star) < 3.0 * b_se + 1e-4);
}

TEST_CASE("fixed-sample residual at the returned point") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    GeneralSEOptions opts;
    opts.p_mc = 100;
    opts.reps = 20;
    opts.seed = 3;
    const auto fp = solve_general_l1_se(spec, 0.5, opts);
    CHECK(fp.residual < 1e-8);
    CHECK(fp.p_mc == 100);
    CHECK(fp.seed == 3);
}

TEST_CASE("determinism: identical seed and config give identical fixed points") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    GeneralSEOptions opts;
    opts.p_mc = 120;
    opts.reps = 24;
    opts.seed = 77;
    const auto a = solve_general_l1_se(spec, 0.4, opts);
    const auto b = solve_general_l1_se(spec, 0.4, opts);
    CHECK(a.tau_star == b.tau_star);
    CHECK(a.b_star == b.b_star);
    CHECK(a.alpha == b.alpha);
    const auto risk_a = general_l1_risk(spec, 0.4, a, opts);
    const auto risk_b = general_l1_risk(spec, 0.4, b, opts);
    CHECK(risk_a.mse == risk_b.mse);
    CHECK(risk_a.r2 == risk_b.r2);
}

TEST_CASE("doubling reps shrinks the spread of tau^2 like 1/sqrt(n)") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    std::vector<double> tau_small, tau_big;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GeneralSEOptions opts;
        opts.p_mc = 60;
        opts.seed = seed;
        opts.reps = 20;
        tau_small.push_back(std::pow(solve_general_l1_se(spec, 0.3, opts).tau_star, 2));
        opts.reps = 80;  // reps x4 so the expected sd ratio is 2
        tau_big.push_back(std::pow(solve_general_l1_se(spec, 0.3, opts).tau_star, 2));
    }
    const double ratio = sd_of(tau_small) / sd_of(tau_big);
    CHECK(ratio > 1.2);
    CHECK(ratio < 3.5);
}

TEST_CASE("alpha_min conventions and monotone g") {
    GeneralSEOptions opts;
    opts.p_mc = 150;
    opts.reps = 30;
    opts.seed = 5;

    CHECK(alpha_min(make_spec(0.5, 0.5, 0.6, 0.05), opts) == 0.0);
    CHECK(alpha_min(make_spec(0.5, 1.0, 0.6, 0.05), opts) == 0.0);

    const ProblemSpec hard = make_spec(0.5, 2.0, 0.6, 0.05);
    McSample sample(hard, opts);
    const double amin = alpha_min(sample);
    CHECK(amin > 0.0);
    CHECK(std::abs(g_hat(sample, amin) - 1.0) < 1e-6);

    // strictly decreasing across an alpha grid (up to MC noise allowance)
    double prev = g_hat(sample, 0.2);
    for (int i = 1; i < 10; ++i) {
        const double alpha = 0.2 + 0.35 * i;
        const double g = g_hat(sample, alpha);
        CHECK(g < prev + 1e-9);
        prev = g;
    }
}

TEST_CASE("calibration round trip on the MC path") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    GeneralSEOptions opts;
    opts.p_mc = 150;
    opts.reps = 30;
    opts.seed = 9;
    McSample sample(spec, opts);
    for (double lambda : {0.1, 1.0}) {
        const double alpha = calibrate_alpha(sample, lambda);
        CHECK(std::abs(lambda_of_alpha(sample, alpha) - lambda) < 1e-6);
    }
}

TEST_CASE("lambda(alpha) approaches the linear asymptote") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    GeneralSEOptions opts;
    opts.p_mc = 200;
    opts.reps = 40;
    opts.seed = 11;
    McSample sample(spec, opts);
    const double tau_inf = std::sqrt(spec.gamma_x * spec.signal_strength() / spec.h2_x);
    const double slope = lambda_of_alpha(sample, 50.0) / 50.0;
    CHECK(std::abs(slope - tau_inf) / tau_inf < 0.05);
}

TEST_CASE("f is convex in zeta on the fixed sample") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    GeneralSEOptions opts;
    opts.p_mc = 120;
    opts.reps = 24;
    opts.seed = 13;
    McSample sample(spec, opts);
    const double alpha = 0.8;
    auto f = [&](double zeta) {
        return spec.gamma_x * zeta * zeta * spec.signal_strength() / spec.h2_x +
               sample.prox_energy(zeta, alpha);
    };
    const double h = 0.5;
    for (double zeta = 0.5; zeta < 6.0; zeta += h) {
        const double second = f(zeta + h) - 2.0 * f(zeta) + f(zeta - h);
        CHECK(second > 0.0);
    }
}

TEST_CASE("general risk reduces to the scalar values at identity covariance") {
    const ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    const double lambda = 0.3;
    const auto scalar_fp = solve_ref_lasso_se(spec, lambda);
    const auto scalar_risk = ref_lasso_risk(spec, lambda, scalar_fp);

    GeneralSEOptions opts;
    opts.p_mc = 250;
    opts.reps = 60;
    opts.seed = 17;
    const auto fp = solve_general_l1_se(spec, lambda, opts);
    const auto risk = general_l1_risk(spec, lambda, fp, opts);
    CHECK(risk.mse >= 0.0);
    CHECK(risk.r2 <= spec.h2_s + 3.0 * risk.r2_se + 1e-6);
    CHECK(std::abs(risk.mse - scalar_risk.mse) < 3.0 * risk.mse_se + 2e-3);
    CHECK(std::abs(risk.r2 - scalar_risk.r2) < 3.0 * risk.r2_se + 2e-3);
}

TEST_CASE("spectrum covariance runs the non-identity path") {
    ProblemSpec spec = make_spec(0.5, 0.5, 0.6, 0.05);
    std::vector<double> evals;
    for (int i = 0; i < 100; ++i) evals.push_back(i % 2 ? 1.5 : 0.5);
    spec.covariance = CovarianceModel::spectrum(evals);
    GeneralSEOptions opts;
    opts.p_mc = 100;
    opts.reps = 30;
    opts.seed = 19;
    const auto fp = solve_general_l1_se(spec, 0.5, opts);
    CHECK(fp.residual < 1e-8);
    CHECK(fp.tau_star > 0.0);
    CHECK(1.0 + fp.b_star > 0.0);
    const auto risk = general_l1_risk(spec, 0.5, fp, opts);
    CHECK(risk.mse > 0.0);
    CHECK(risk.r2 > 0.0);
}
