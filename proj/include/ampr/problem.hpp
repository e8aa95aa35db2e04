#pragma once

#include <iosfwd>
#include <string>

#include "ampr/covariance.hpp"
#include "ampr/prior.hpp"

namespace ampr {

// Dimensionless description of the asymptotic regime: aspect ratios,
// heritabilities, signal prior, and predictor covariance.
struct ProblemSpec {
    double gamma_x = 0.5;  // p / n_x
    double gamma_w = 0.5;  // p / n_w
    double gamma_s = 0.5;  // p / n_s
    double h2_x = 0.5;
    double h2_s = 0.5;
    SignalPrior prior = SignalPrior::bernoulli_gaussian(0.05, 1.0);
    CovarianceModel covariance = CovarianceModel::identity(1);

    void validate() const;

    // lim p^{-1} E ||beta0||_Sigma^2 in per-coordinate units:
    // E beta_bar^2 times the mean eigenvalue of Sigma.
    double signal_strength() const;
};

// sigma_eps^2 = E||beta0||_Sigma^2 (1 - h2) / h2 for the given heritability
double noise_variance(const ProblemSpec& spec, double h2);
inline double noise_variance_train(const ProblemSpec& spec) { return noise_variance(spec, spec.h2_x); }
inline double noise_variance_test(const ProblemSpec& spec) { return noise_variance(spec, spec.h2_s); }

// Multiplicative factors mapping one normalization convention onto the
// other at finite p: scaled_quantity = factor * quantity. The appendix
// convention carries the lambda ||beta||_1 penalty with O(1) coordinates
// scaled down by sqrt(p); the main-text convention uses the
// lambda/sqrt(p) penalty.
struct ScalingRecord {
    double beta = 1.0;
    double x = 1.0;
    double w = 1.0;
    double eps_x = 1.0;
    double y_x = 1.0;
    double lambda = 1.0;

    ScalingRecord inverse() const;
    ScalingRecord compose(const ScalingRecord& then) const;
};

enum class NormalizationDirection { ToAppendix, ToMainText };

ScalingRecord convert_normalization(const ProblemSpec& spec, int p, NormalizationDirection direction);

// Plain-text key = value config round trip. Exact keys: gamma_x, gamma_w,
// gamma_s, h2_x, h2_s, prior.kind, prior.kappa, prior.sigma_beta2,
// covariance.kind, covariance.eigenvalues.
ProblemSpec parse_problem_spec(std::istream& in);
ProblemSpec load_problem_spec(const std::string& path);
void write_problem_spec(const ProblemSpec& spec, std::ostream& out);

}  // namespace ampr
