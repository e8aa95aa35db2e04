#include "ampr/solvers.hpp"

#include <cmath>
#include <stdexcept>

#include "ampr/errors.hpp"
#include "ampr/parallel.hpp"
#include "ampr/rng.hpp"
#include "ampr/soft_threshold.hpp"

namespace ampr {

SummaryStats build_summary(const SyntheticDataset& data) {
    SummaryStats s;
    s.gram_x = kernels::gram(data.x, 1.0 / data.n_x());
    s.gram_w = kernels::gram(data.w, 1.0 / data.n_w());
    s.xty = kernels::matvec_t(data.x, data.y_x) / data.n_x();
    return s;
}

namespace {

double lasso_kkt(const Eigen::VectorXd& grad, const Eigen::VectorXd& beta, double theta) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double r = beta[j] != 0.0
                             ? std::abs(grad[j] + theta * (beta[j] > 0.0 ? 1.0 : -1.0))
                             : std::max(0.0, std::abs(grad[j]) - theta);
        worst = std::max(worst, r);
    }
    return worst;
}

}  // namespace

Eigen::VectorXd coordinate_descent(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double theta,
                                   const FitOptions& opts, const Eigen::VectorXd* warm_start) {
    const Eigen::Index p = b.size();
    Eigen::VectorXd beta = warm_start ? *warm_start : Eigen::VectorXd::Zero(p);
    Eigen::VectorXd grad = a * beta - b;

    auto update = [&](Eigen::Index j) {
        const double ajj = a(j, j);
        const double target = beta[j] - grad[j] / ajj;
        const double bj = soft_threshold(target, theta / ajj);
        const double delta = bj - beta[j];
        if (delta != 0.0) {
            grad.noalias() += a.col(j) * delta;
            beta[j] = bj;
        }
        return std::abs(delta);
    };

    int full_sweeps = 0;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        const bool screening = full_sweeps >= opts.screen_after;
        double max_delta = 0.0;
        if (screening) {
            // inner passes over the current active set until it stabilizes
            for (int inner = 0; inner < 100; ++inner) {
                double inner_delta = 0.0;
                for (Eigen::Index j = 0; j < p; ++j)
                    if (beta[j] != 0.0) inner_delta = std::max(inner_delta, update(j));
                if (inner_delta < 0.1 * opts.kkt_tol) break;
            }
        }
        for (Eigen::Index j = 0; j < p; ++j) max_delta = std::max(max_delta, update(j));
        ++full_sweeps;
        if (max_delta < 0.1 * opts.kkt_tol || sweep + 1 == opts.max_sweeps) {
            if (lasso_kkt(grad, beta, theta) < opts.kkt_tol) return beta;
        }
    }
    throw NoConvergence("coordinate descent sweep cap reached");
}

Eigen::VectorXd fit_ref_lasso(const SummaryStats& stats, int p, double lambda,
                              const FitOptions& opts, const Eigen::VectorXd* warm) {
    if (lambda < 0.0) throw OutOfRange("lambda must be nonnegative");
    return coordinate_descent(stats.gram_w, stats.xty, lambda / std::sqrt(double(p)), opts, warm);
}

Eigen::VectorXd fit_lasso(const SummaryStats& stats, int p, double lambda, const FitOptions& opts,
                          const Eigen::VectorXd* warm) {
    if (lambda < 0.0) throw OutOfRange("lambda must be nonnegative");
    return coordinate_descent(stats.gram_x, stats.xty, lambda / std::sqrt(double(p)), opts, warm);
}

namespace {

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs, double lambda) {
    const Eigen::Index p = gram.rows();
    if (lambda <= 0.0) {
        // gram is singular whenever p exceeds the sample size
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        if (llt.info() != Eigen::Success) throw SingularSystem("ridge system singular at lambda = 0");
        return llt.solve(rhs);
    }
    Eigen::MatrixXd m = gram;
    m.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw SingularSystem("ridge factorization failed");
    return llt.solve(rhs);
}

}  // namespace

Eigen::VectorXd fit_ridge(const SummaryStats& stats, double lambda) {
    return ridge_solve(stats.gram_x, stats.xty, lambda);
}

Eigen::VectorXd fit_ref_ridge(const SummaryStats& stats, double lambda) {
    return ridge_solve(stats.gram_w, stats.xty, lambda);
}

Eigen::VectorXd fit_estimator(const SummaryStats& stats, int p, Estimator estimator, double lambda,
                              const FitOptions& opts, const Eigen::VectorXd* warm) {
    switch (estimator) {
        case Estimator::Lasso: return fit_lasso(stats, p, lambda, opts, warm);
        case Estimator::RefLasso: return fit_ref_lasso(stats, p, lambda, opts, warm);
        case Estimator::Ridge: return fit_ridge(stats, lambda);
        case Estimator::RefRidge: return fit_ref_ridge(stats, lambda);
    }
    throw OutOfRange("unknown estimator");
}

Eigen::VectorXd fit_ref_lasso(const SyntheticDataset& data, double lambda, const FitOptions& opts) {
    return fit_ref_lasso(build_summary(data), data.p(), lambda, opts);
}
Eigen::VectorXd fit_lasso(const SyntheticDataset& data, double lambda, const FitOptions& opts) {
    return fit_lasso(build_summary(data), data.p(), lambda, opts);
}
Eigen::VectorXd fit_ridge(const SyntheticDataset& data, double lambda) {
    return fit_ridge(build_summary(data), lambda);
}
Eigen::VectorXd fit_ref_ridge(const SyntheticDataset& data, double lambda) {
    return fit_ref_ridge(build_summary(data), lambda);
}

EvalResult evaluate(const SyntheticDataset& data, const Eigen::VectorXd& beta_hat) {
    if (beta_hat.size() != data.p()) throw DimensionTooSmall("estimate dimension mismatch");
    EvalResult r;
    const Eigen::VectorXd diff = beta_hat - data.beta0;
    r.mse = data.sigma.quad_form(diff);
    const Eigen::VectorXd pred = kernels::matvec(data.s, beta_hat);
    const double pn = pred.squaredNorm();
    if (pn == 0.0) {
        r.r2 = 0.0;
    } else {
        const double dot = data.y_s.dot(pred);
        r.r2 = dot * dot / (data.y_s.squaredNorm() * pn);
    }
    return r;
}

EmpiricalRisk summarize(const std::vector<double>& mse, const std::vector<double>& r2) {
    EmpiricalRisk e;
    e.mse_values = mse;
    e.r2_values = r2;
    const int n = static_cast<int>(mse.size());
    for (double v : mse) e.mse_mean += v;
    for (double v : r2) e.r2_mean += v;
    e.mse_mean /= n;
    e.r2_mean /= n;
    double am = 0.0, ar = 0.0;
    for (double v : mse) am += (v - e.mse_mean) * (v - e.mse_mean);
    for (double v : r2) ar += (v - e.r2_mean) * (v - e.r2_mean);
    if (n > 1) {
        e.mse_se = std::sqrt(am / (n - 1.0) / n);
        e.r2_se = std::sqrt(ar / (n - 1.0) / n);
    }
    return e;
}

std::vector<std::vector<EmpiricalRisk>> monte_carlo_sweep(
    const ProblemSpec& spec, int p, const std::vector<Estimator>& estimators,
    const std::vector<double>& lambdas, int reps, std::uint64_t seed, const FitOptions& opts) {
    if (reps < 2) throw OutOfRange("monte_carlo requires reps >= 2");
    if (estimators.empty() || lambdas.empty()) throw OutOfRange("empty estimator or lambda list");

    const size_t cells = estimators.size() * lambdas.size();
    std::vector<std::vector<double>> mse(cells, std::vector<double>(reps));
    std::vector<std::vector<double>> r2(cells, std::vector<double>(reps));
    std::string failure;

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r) {
        try {
            const SyntheticDataset data = generate(spec, p, derive_seed(seed, r + 1));
            const SummaryStats stats = build_summary(data);
            for (size_t ei = 0; ei < estimators.size(); ++ei) {
                Eigen::VectorXd warm;
                bool have_warm = false;
                // sweep lambdas from large to small, warm-starting the lasso paths
                for (size_t li = lambdas.size(); li-- > 0;) {
                    const Eigen::VectorXd beta =
                        fit_estimator(stats, p, estimators[ei], lambdas[li], opts,
                                      have_warm ? &warm : nullptr);
                    if (estimators[ei] == Estimator::Lasso || estimators[ei] == Estimator::RefLasso) {
                        warm = beta;
                        have_warm = true;
                    }
                    const EvalResult ev = evaluate(data, beta);
                    mse[ei * lambdas.size() + li][r] = ev.mse;
                    r2[ei * lambdas.size() + li][r] = ev.r2;
                }
            }
        } catch (const std::exception& ex) {
#pragma omp critical
            if (failure.empty()) failure = "replicate " + std::to_string(r) + ": " + ex.what();
        }
    }
    if (!failure.empty()) throw NoConvergence(failure);

    std::vector<std::vector<EmpiricalRisk>> out(estimators.size());
    for (size_t ei = 0; ei < estimators.size(); ++ei) {
        out[ei].resize(lambdas.size());
        for (size_t li = 0; li < lambdas.size(); ++li)
            out[ei][li] = summarize(mse[ei * lambdas.size() + li], r2[ei * lambdas.size() + li]);
    }
    return out;
}

EmpiricalRisk monte_carlo(const ProblemSpec& spec, int p, double lambda, Estimator estimator,
                          int reps, std::uint64_t seed, const FitOptions& opts) {
    return monte_carlo_sweep(spec, p, {estimator}, {lambda}, reps, seed, opts)[0][0];
}

}  // namespace ampr
