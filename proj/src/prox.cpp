#include "ampr/prox.hpp"

#include <cmath>

#include "ampr/errors.hpp"
#include "ampr/rng.hpp"
#include "ampr/soft_threshold.hpp"

namespace ampr {

namespace {

double kkt_residual(const Eigen::MatrixXd& sigma_dense, const Eigen::VectorXd& grad,
                    const Eigen::VectorXd& w, double theta) {
    (void)sigma_dense;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        double r;
        if (w[j] != 0.0)
            r = std::abs(grad[j] + theta * (w[j] > 0.0 ? 1.0 : -1.0));
        else
            r = std::max(0.0, std::abs(grad[j]) - theta);
        worst = std::max(worst, r);
    }
    return worst;
}

ProxSolution prox_diagonal(const Eigen::VectorXd& evals, const Eigen::VectorXd& v, double theta) {
    ProxSolution sol;
    const Eigen::Index p = v.size();
    sol.w.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        sol.w[j] = soft_threshold(v[j], theta / evals[j]);
        if (sol.w[j] != 0.0) sol.active_set.push_back(static_cast<int>(j));
    }
    sol.kkt_residual = 0.0;
    sol.sweeps = 1;
    return sol;
}

}  // namespace

ProxSolution prox_sigma(const ProxProblem& problem, const ProxOptions& opts) {
    if (problem.sigma == nullptr) throw OutOfRange("prox problem needs a covariance");
    const CovarianceModel& sigma = *problem.sigma;
    const Eigen::Index p = problem.v.size();
    if (p != sigma.dim()) throw DimensionTooSmall("prox input dimension does not match covariance");
    if (p > problem.max_dim) throw OutOfRange("prox dimension above configured maximum");
    if (problem.theta < 0.0) throw OutOfRange("prox threshold must be nonnegative");

    if (problem.theta == 0.0) {
        ProxSolution sol;
        sol.w = problem.v;
        for (Eigen::Index j = 0; j < p; ++j) sol.active_set.push_back(static_cast<int>(j));
        sol.kkt_residual = 0.0;
        sol.sweeps = 0;
        return sol;
    }

    if (sigma.kind() != CovarianceModel::Kind::DenseSPD)
        return prox_diagonal(sigma.eigenvalues(), problem.v, problem.theta);

    const Eigen::MatrixXd& s = sigma.dense();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd grad = -(s * problem.v);  // Sigma (w - v) at w = 0

    ProxSolution sol;
    for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double sjj = s(j, j);
            const double target = w[j] - grad[j] / sjj;
            const double wj = soft_threshold(target, problem.theta / sjj);
            const double delta = wj - w[j];
            if (delta != 0.0) {
                grad.noalias() += s.col(j) * delta;
                w[j] = wj;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        if (max_delta < opts.coord_tol) {
            const double kkt = kkt_residual(s, grad, w, problem.theta);
            if (kkt < opts.kkt_tol) {
                sol.w = std::move(w);
                sol.kkt_residual = kkt;
                sol.sweeps = sweep;
                for (Eigen::Index j = 0; j < p; ++j)
                    if (sol.w[j] != 0.0) sol.active_set.push_back(static_cast<int>(j));
                return sol;
            }
        }
    }
    throw NoConvergence("prox_sigma: coordinate descent sweep cap reached");
}

int div_eta(const ProxSolution& sol) { return static_cast<int>(sol.active_set.size()); }

double hutchinson_divergence(const CovarianceModel& sigma, const Eigen::VectorXd& v, double theta,
                             int probes, double step, std::uint64_t seed) {
    SplitMix64 rng(seed);
    const Eigen::Index p = v.size();
    double acc = 0.0;
    for (int k = 0; k < probes; ++k) {
        Eigen::VectorXd dir(p);
        for (Eigen::Index j = 0; j < p; ++j) dir[j] = rng.next_u64() & 1ULL ? 1.0 : -1.0;
        ProxProblem plus{&sigma, v + step * dir, theta};
        ProxProblem minus{&sigma, v - step * dir, theta};
        const Eigen::VectorXd diff = prox_sigma(plus).w - prox_sigma(minus).w;
        acc += dir.dot(diff) / (2.0 * step);
    }
    return acc / probes;
}

}  // namespace ampr
