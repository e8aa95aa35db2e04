#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ampr/errors.hpp"
#include "ampr/problem.hpp"
#include "ampr/quadrature.hpp"
#include "ampr/scalar_l1.hpp"
#include "ampr/soft_threshold.hpp"

using namespace ampr;

namespace {

ProblemSpec default_spec() {
    ProblemSpec spec;
    spec.gamma_x = 0.5;
    spec.gamma_w = 0.5;
    spec.gamma_s = 0.5;
    spec.h2_x = 0.5;
    spec.h2_s = 0.5;
    spec.prior = SignalPrior::bernoulli_gaussian(0.05, 1.0);
    spec.covariance = CovarianceModel::identity(1);
    return spec;
}

}  // namespace

TEST_CASE("prior second moments") {
    CHECK(SignalPrior::bernoulli_gaussian(0.05, 1.0).second_moment() == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(SignalPrior::discrete_mixture({{0.0, 0.5}, {1.0, 0.5}}).second_moment() ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(SignalPrior::gaussian_mixture({{1.0, 0.0, 2.0}}).second_moment() ==
          doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("prior validation") {
    CHECK_THROWS_AS(SignalPrior::bernoulli_gaussian(0.0, 1.0), OutOfRange);
    CHECK_THROWS_AS(SignalPrior::bernoulli_gaussian(1.5, 1.0), OutOfRange);
    CHECK_THROWS_AS(SignalPrior::discrete_mixture({{0.0, 0.5}, {1.0, 0.6}}), OutOfRange);
    CHECK_NOTHROW(SignalPrior::bernoulli_gaussian(1.0, 2.0));  // fully dense is allowed
}

TEST_CASE("noise variance from heritability") {
    ProblemSpec spec = default_spec();
    CHECK(noise_variance_train(spec) == doctest::Approx(0.05).epsilon(1e-14));

    spec.prior = SignalPrior::bernoulli_gaussian(0.3, 1.0);
    spec.h2_x = 0.6;
    CHECK(noise_variance_train(spec) == doctest::Approx(0.2).epsilon(1e-12));

    spec.prior = SignalPrior::bernoulli_gaussian(1.0, 1.0);
    spec.h2_x = 1.0 - 1e-12;
    CHECK(noise_variance_train(spec) < 1e-10);

    spec.h2_x = 1.5;
    CHECK_THROWS_AS(noise_variance_train(spec), HeritabilityOutOfRange);
}

TEST_CASE("Gauss-Hermite integrates monomials exactly") {
    const Quadrature q = Quadrature::gauss_hermite(96);
    // moments of N(0,1): 1, 0, 1, 0, 3, 0, 15, 0, 105
    const double expected[] = {1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0, 105.0};
    for (int k = 0; k <= 8; ++k) {
        const double v = q.expect([&](double z) { return std::pow(z, k); });
        CHECK(std::abs(v - expected[k]) < 1e-12 * std::max(1.0, expected[k]));
    }
    const Quadrature q64 = Quadrature::gauss_hermite(64);
    for (int k = 0; k <= 8; ++k) {
        const double v = q64.expect([&](double z) { return std::pow(z, k); });
        CHECK(std::abs(v - expected[k]) < 1e-12 * std::max(1.0, expected[k]));
    }
}

TEST_CASE("composite rule integrates monomials and kinked integrands") {
    const Quadrature q = Quadrature::composite_normal();
    CHECK(q.expect([](double z) { return z * z; }) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(q.expect([](double z) { return z * z * z * z; }) == doctest::Approx(3.0).epsilon(1e-13));
    // kinked: E eta(z, 0.8)^2 against the closed form
    const double closed = gauss::soft_sq_moment(1.0, 0.8);
    const double numeric = q.expect([](double z) { return std::pow(soft_threshold(z, 0.8), 2); });
    CHECK(std::abs(numeric - closed) < 1e-10);
}

TEST_CASE("expect_2d basics") {
    const SignalPrior prior = SignalPrior::bernoulli_gaussian(0.05, 1.0);
    const Quadrature q = Quadrature::gauss_hermite(96);
    CHECK(expect_2d(prior, q, [](double z, double) { return z * z; }) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expect_2d(prior, q, [](double, double b) { return b * b; }) ==
          doctest::Approx(0.05).epsilon(1e-12));
    CHECK_THROWS_AS(expect_2d(prior, q, [](double z, double) { return std::log(z); }), NonFinite);
}

TEST_CASE("expect_2d matches the closed-form soft-threshold moment") {
    // E eta(z + beta, 0.8)^2 for the Bernoulli-Gaussian prior (zeta = 1)
    const SignalPrior prior = SignalPrior::bernoulli_gaussian(0.05, 1.0);
    const Quadrature q = Quadrature::composite_normal();
    const double numeric = expect_2d(prior, q, [](double z, double b) {
        return std::pow(soft_threshold(z + b, 0.8), 2);
    });
    const ScalarSEMoments closed = ref_lasso_moments(prior, 1.0, 0.8);
    CHECK(std::abs(numeric - closed.m2) < 1e-8);
}

TEST_CASE("polynomial moments up to total degree 4 for all prior kinds") {
    const Quadrature q = Quadrature::gauss_hermite(96);
    const auto priors = {SignalPrior::bernoulli_gaussian(0.3, 2.0),
                         SignalPrior::discrete_mixture({{-1.0, 0.25}, {0.0, 0.5}, {2.0, 0.25}}),
                         SignalPrior::gaussian_mixture({{0.4, -1.0, 0.5}, {0.6, 2.0, 1.5}})};
    for (const auto& prior : priors) {
        double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
        if (prior.kind() == SignalPrior::Kind::BernoulliGaussian) {
            m2 = prior.second_moment();
            m4 = 3.0 * prior.kappa() * prior.sigma_beta2() * prior.sigma_beta2();
        } else if (prior.kind() == SignalPrior::Kind::DiscreteMixture) {
            for (const auto& a : prior.atoms()) {
                m1 += a.weight * a.value;
                m2 += a.weight * std::pow(a.value, 2);
                m3 += a.weight * std::pow(a.value, 3);
                m4 += a.weight * std::pow(a.value, 4);
            }
        } else {
            for (const auto& c : prior.components()) {
                m1 += c.weight * c.mean;
                m2 += c.weight * (c.mean * c.mean + c.variance);
                m3 += c.weight * (std::pow(c.mean, 3) + 3.0 * c.mean * c.variance);
                m4 += c.weight * (std::pow(c.mean, 4) + 6.0 * c.mean * c.mean * c.variance +
                                  3.0 * c.variance * c.variance);
            }
        }
        CHECK(std::abs(expect_2d(prior, q, [](double, double b) { return b; }) - m1) < 1e-10);
        CHECK(std::abs(expect_2d(prior, q, [](double, double b) { return b * b; }) - m2) < 1e-10);
        CHECK(std::abs(expect_2d(prior, q, [](double z, double b) { return z * b * b; })) < 1e-10);
        CHECK(std::abs(expect_2d(prior, q, [](double z, double b) { return z * z * b * b; }) - m2) <
              1e-10);
        CHECK(std::abs(expect_2d(prior, q, [](double, double b) { return b * b * b; }) - m3) < 1e-10);
        CHECK(std::abs(expect_2d(prior, q, [](double, double b) { return b * b * b * b; }) - m4) <
              1e-9);
        CHECK(std::abs(expect_2d(prior, q, [](double, double b) { return b * b; }) -
                       prior.second_moment()) < 1e-12);
    }
}

TEST_CASE("covariance models") {
    const auto ident = CovarianceModel::identity(4);
    CHECK(ident.mean_eigenvalue() == 1.0);

    const auto spec = CovarianceModel::spectrum({0.5, 1.5});
    CHECK(spec.mean_eigenvalue() == doctest::Approx(1.0));
    CHECK_THROWS_AS(CovarianceModel::spectrum({1.0, -0.5}), OutOfRange);

    Eigen::MatrixXd m(2, 2);
    m << 2.0, 0.3, 0.3, 1.0;
    const auto dense = CovarianceModel::dense_spd(m);
    Eigen::VectorXd x(2);
    x << 1.0, -2.0;
    CHECK(dense.quad_form(x) == doctest::Approx(x.dot(m * x)).epsilon(1e-12));
    CHECK((dense.apply_sqrt(dense.apply_sqrt(x)) - m * x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((dense.apply_inv(m * x) - x).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.5, 0.2, 1.0;
    CHECK_THROWS_AS(CovarianceModel::dense_spd(asym), OutOfRange);
}

TEST_CASE("identity and equivalent spectrum agree in quadratic forms") {
    const auto ident = CovarianceModel::identity(3);
    const auto spec = CovarianceModel::spectrum({1.0, 1.0, 1.0});
    Eigen::VectorXd x(3);
    x << 0.2, -1.0, 3.0;
    CHECK(std::abs(ident.quad_form(x) - spec.quad_form(x)) < 1e-12);
    CHECK((ident.apply_inv_sqrt(x) - spec.apply_inv_sqrt(x)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("normalization conversion round trip and lambda factor") {
    ProblemSpec spec = default_spec();
    const int p = 10000;
    const auto to_app = convert_normalization(spec, p, NormalizationDirection::ToAppendix);
    const auto to_main = convert_normalization(spec, p, NormalizationDirection::ToMainText);
    const auto round = to_app.compose(to_main);
    CHECK(round.beta == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(round.x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(round.w == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(round.eps_x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(round.y_x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(round.lambda == doctest::Approx(1.0).epsilon(1e-14));

    // lambda_maintext = 1.0 at p = 10000 maps to 0.01
    CHECK(to_app.lambda * 1.0 == doctest::Approx(0.01).epsilon(1e-14));
}

TEST_CASE("problem spec config round trip") {
    ProblemSpec spec = default_spec();
    spec.gamma_x = 0.25;
    spec.h2_x = 0.7;
    spec.covariance = CovarianceModel::spectrum({0.5, 1.5, 1.0});
    std::stringstream ss;
    write_problem_spec(spec, ss);
    const ProblemSpec back = parse_problem_spec(ss);
    CHECK(back.gamma_x == doctest::Approx(spec.gamma_x));
    CHECK(back.gamma_w == doctest::Approx(spec.gamma_w));
    CHECK(back.h2_x == doctest::Approx(spec.h2_x));
    CHECK(back.h2_s == doctest::Approx(spec.h2_s));
    CHECK(back.prior.kappa() == doctest::Approx(spec.prior.kappa()));
    CHECK(back.covariance.kind() == CovarianceModel::Kind::Spectrum);
    CHECK(back.covariance.dim() == 3);

    std::stringstream bad("gamma_x 0.5\n");
    CHECK_THROWS_AS(parse_problem_spec(bad), ConfigParse);
    std::stringstream missing("gamma_x = 0.5\n");
    CHECK_THROWS_AS(parse_problem_spec(missing), ConfigParse);
}
