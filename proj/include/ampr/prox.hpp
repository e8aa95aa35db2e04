#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ampr/covariance.hpp"

namespace ampr {

// Proximal problem for the Sigma-weighted soft threshold:
// minimize 1/2 ||w - v||_Sigma^2 + theta ||w||_1.
struct ProxProblem {
    const CovarianceModel* sigma = nullptr;
    Eigen::VectorXd v;
    double theta = 0.0;
    int max_dim = 2000;
};

struct ProxSolution {
    Eigen::VectorXd w;
    std::vector<int> active_set;
    double kkt_residual = 0.0;
    int sweeps = 0;
};

struct ProxOptions {
    double kkt_tol = 1e-8;
    double coord_tol = 1e-10;
    int max_sweeps = 100000;
};

// Separable soft threshold for diagonal Sigma; cyclic coordinate descent
// with exact scalar updates otherwise (the objective is strongly convex).
ProxSolution prox_sigma(const ProxProblem& problem, const ProxOptions& opts = {});

// Exact divergence of eta_theta at v: the active-set size (a.s.).
int div_eta(const ProxSolution& sol);

// Central finite-difference divergence estimate via the Hutchinson
// identity with Rademacher probes. Used as an independent check on
// div_eta and for user-supplied denoisers in the matrix-AMP core.
double hutchinson_divergence(const CovarianceModel& sigma, const Eigen::VectorXd& v, double theta,
                             int probes = 8, double step = 1e-5, std::uint64_t seed = 0);

}  // namespace ampr
