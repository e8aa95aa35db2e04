#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ampr/errors.hpp"
#include "ampr/prox.hpp"
#include "ampr/rng.hpp"

using namespace ampr;

namespace {

double objective(const CovarianceModel& sigma, const Eigen::VectorXd& v, double theta,
                 const Eigen::VectorXd& w) {
    const Eigen::VectorXd diff = w - v;
    return 0.5 * sigma.quad_form(diff) + theta * w.lpNorm<1>();
}

CovarianceModel random_spd(int p, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Eigen::MatrixXd g(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) g(i, j) = rng.next_gaussian();
    Eigen::MatrixXd m = g * g.transpose() / p + Eigen::MatrixXd::Identity(p, p) * 0.5;
    return CovarianceModel::dense_spd(m);
}

}  // namespace

TEST_CASE("identity covariance reduces to the elementwise soft threshold") {
    const auto sigma = CovarianceModel::identity(2);
    Eigen::VectorXd v(2);
    v << 2.0, -0.3;
    const auto sol = prox_sigma({&sigma, v, 0.5});
    CHECK(sol.w[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(sol.w[1] == 0.0);
    CHECK(div_eta(sol) == 1);
}

TEST_CASE("theta = 0 is the identity map") {
    const auto sigma = random_spd(6, 3);
    SplitMix64 rng(4);
    Eigen::VectorXd v(6);
    for (int i = 0; i < 6; ++i) v[i] = rng.next_gaussian();
    const auto sol = prox_sigma({&sigma, v, 0.0});
    CHECK((sol.w - v).cwiseAbs().maxCoeff() == 0.0);
    CHECK(div_eta(sol) == 6);
}

TEST_CASE("dense prox satisfies the KKT conditions") {
    const auto sigma = random_spd(12, 7);
    SplitMix64 rng(8);
    Eigen::VectorXd v(12);
    for (int i = 0; i < 12; ++i) v[i] = 1.5 * rng.next_gaussian();
    const double theta = 0.4;
    const auto sol = prox_sigma({&sigma, v, theta});
    CHECK(sol.kkt_residual < 1e-8);

    const Eigen::VectorXd grad = sigma.dense() * (sol.w - v);
    for (int j = 0; j < 12; ++j) {
        if (sol.w[j] != 0.0)
            CHECK(std::abs(grad[j] + theta * (sol.w[j] > 0 ? 1.0 : -1.0)) < 1e-8);
        else
            CHECK(std::abs(grad[j]) <= theta + 1e-8);
    }
}

TEST_CASE("prox solution is a local minimum against random perturbations") {
    const auto sigma = random_spd(5, 11);
    SplitMix64 rng(12);
    Eigen::VectorXd v(5);
    for (int i = 0; i < 5; ++i) v[i] = rng.next_gaussian();
    const double theta = 0.3;
    const auto sol = prox_sigma({&sigma, v, theta});
    const double f0 = objective(sigma, v, theta, sol.w);
    for (int k = 0; k < 10000; ++k) {
        Eigen::VectorXd delta(5);
        for (int i = 0; i < 5; ++i) delta[i] = rng.next_gaussian();
        delta *= 1e-3 / delta.norm();
        CHECK(objective(sigma, v, theta, sol.w + delta) >= f0 - 1e-14);
    }
}

TEST_CASE("divergence counts the active set") {
    const auto sigma = CovarianceModel::identity(4);
    Eigen::VectorXd v(4);
    v << 0.1, -0.2, 3.0, -4.0;
    CHECK(div_eta(prox_sigma({&sigma, v, 10.0})) == 0);  // all-zero solution
    CHECK(div_eta(prox_sigma({&sigma, v, 0.0})) == 4);   // identity map
    CHECK(div_eta(prox_sigma({&sigma, v, 0.25})) == 2);  // |v_j| > theta count
}

TEST_CASE("spectrum covariance thresholds coordinatewise at theta / s_j") {
    const auto sigma = CovarianceModel::spectrum({0.5, 2.0});
    Eigen::VectorXd v(2);
    v << 0.7, 0.7;
    const auto sol = prox_sigma({&sigma, v, 0.5});
    // thresholds are 1.0 and 0.25
    CHECK(sol.w[0] == 0.0);
    CHECK(sol.w[1] == doctest::Approx(0.45).epsilon(1e-14));
}

TEST_CASE("hutchinson estimate tracks the exact divergence") {
    const auto sigma = random_spd(20, 21);
    SplitMix64 rng(22);
    Eigen::VectorXd v(20);
    for (int i = 0; i < 20; ++i) v[i] = 2.0 * rng.next_gaussian();
    const double theta = 0.5;
    const auto sol = prox_sigma({&sigma, v, theta});
    const double exact = static_cast<double>(div_eta(sol));
    if (exact > 0) {
        const double estimate = hutchinson_divergence(sigma, v, theta, 8, 1e-5, 5);
        CHECK(std::abs(estimate - exact) / exact < 0.10);
    }
}

TEST_CASE("dimension guard") {
    const auto sigma = CovarianceModel::identity(8);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(8);
    ProxProblem problem{&sigma, v, 0.1, 4};
    CHECK_THROWS_AS(prox_sigma(problem), OutOfRange);
}
