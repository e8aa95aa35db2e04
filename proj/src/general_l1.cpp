#include "ampr/general_l1.hpp"

#include <cmath>

#include "ampr/brent.hpp"
#include "ampr/errors.hpp"
#include "ampr/prox.hpp"
#include "ampr/rng.hpp"

namespace ampr {

namespace {

CovarianceModel covariance_at(const ProblemSpec& spec, int p_mc) {
    if (spec.covariance.is_identity()) return CovarianceModel::identity(p_mc);
    if (spec.covariance.dim() != p_mc)
        throw DimensionTooSmall("covariance dimension must equal p_mc for the MC path");
    return spec.covariance;
}

}  // namespace

McSample::McSample(const ProblemSpec& spec, const GeneralSEOptions& opts)
    : spec_(spec), opts_(opts), cov_(covariance_at(spec, opts.p_mc)) {
    const int p = opts_.p_mc;
    whitened_noise_.resize(p, opts_.reps);
    signals_.resize(p, opts_.reps);
    for (int r = 0; r < opts_.reps; ++r) {
        SplitMix64 rng(derive_seed(opts_.seed, static_cast<std::uint64_t>(r)));
        Eigen::VectorXd z(p);
        for (int j = 0; j < p; ++j) z[j] = rng.next_gaussian();
        whitened_noise_.col(r) = cov_.apply_inv_sqrt(z);
        for (int j = 0; j < p; ++j) signals_(j, r) = spec_.prior.sample(rng);
    }
}

void McSample::prox_moments(double zeta, double alpha, double& energy, double& divergence) const {
    const int reps = opts_.reps;
    const int p = opts_.p_mc;
    Eigen::VectorXd e(reps), d(reps);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r) {
        ProxProblem problem{&cov_, whitened_noise_.col(r) + zeta * signals_.col(r), alpha,
                            std::max(p, 2000)};
        const ProxSolution sol = prox_sigma(problem);
        e[r] = cov_.quad_form(sol.w);
        d[r] = static_cast<double>(div_eta(sol));
    }
    // fixed aggregation order keeps results independent of thread scheduling
    double se = 0.0, sd = 0.0;
    for (int r = 0; r < reps; ++r) {
        se += e[r];
        sd += d[r];
    }
    const double scale = spec_.gamma_w / static_cast<double>(p);
    energy = scale * se / reps;
    divergence = scale * sd / reps;
}

double McSample::prox_energy(double zeta, double alpha) const {
    double e, d;
    prox_moments(zeta, alpha, e, d);
    return e;
}

double McSample::prox_divergence(double zeta, double alpha) const {
    double e, d;
    prox_moments(zeta, alpha, e, d);
    return d;
}

Eigen::VectorXd McSample::prox_energy_samples(double zeta, double alpha) const {
    const int reps = opts_.reps;
    const int p = opts_.p_mc;
    Eigen::VectorXd e(reps);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r) {
        ProxProblem problem{&cov_, whitened_noise_.col(r) + zeta * signals_.col(r), alpha,
                            std::max(p, 2000)};
        e[r] = cov_.quad_form(prox_sigma(problem).w) * spec_.gamma_w / static_cast<double>(p);
    }
    return e;
}

double g_hat(const McSample& sample, double alpha) { return sample.prox_energy(0.0, alpha); }

double alpha_min(const McSample& sample) {
    if (sample.spec().gamma_w <= 1.0) return 0.0;
    auto g = [&](double a) { return g_hat(sample, a) - 1.0; };
    double lo = 1e-10;
    if (g(lo) <= 0.0) throw BracketFailure("alpha_min: g(0+) <= 1 despite gamma_w > 1");
    double hi = 1.0;
    int guard = 0;
    while (g(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw BracketFailure("alpha_min: no upper bracket");
    }
    return brent_root(g, lo, hi, 1e-12);
}

double alpha_min(const ProblemSpec& spec, const GeneralSEOptions& opts) {
    if (spec.gamma_w <= 1.0) return 0.0;
    McSample sample(spec, opts);
    return alpha_min(sample);
}

namespace {

struct InnerSolution {
    double zeta = 0.0;
    double draw = 0.0;  // 1 - (1/n_w) E Div eta, unclamped
    double f_residual = 0.0;
};

double f_hat(const McSample& sample, double zeta, double alpha) {
    const ProblemSpec& spec = sample.spec();
    const double first = spec.gamma_x * zeta * zeta * spec.prior.second_moment() *
                         sample.covariance().mean_eigenvalue() / spec.h2_x;
    return first + sample.prox_energy(zeta, alpha);
}

InnerSolution solve_inner(const McSample& sample, double alpha) {
    auto f1 = [&](double z) { return f_hat(sample, z, alpha) - 1.0; };
    if (f1(0.0) >= 0.0)
        throw AlphaBelowMin("f(0, alpha) >= 1 on the MC sample: alpha at or below alpha_min");
    double hi = 1.0;
    int doublings = 0;
    while (f1(hi) < 0.0) {
        hi *= 2.0;
        if (++doublings > 60) throw InfeasibleRegime("zeta bracket cap 2^60 exceeded");
    }
    InnerSolution s;
    s.zeta = brent_root(f1, 0.0, hi, 1e-13);
    double energy, divergence;
    sample.prox_moments(s.zeta, alpha, energy, divergence);
    s.draw = 1.0 - divergence;
    s.f_residual = std::abs(f1(s.zeta));
    return s;
}

}  // namespace

double lambda_of_alpha(const McSample& sample, double alpha) {
    if (!(alpha > 0.0)) throw OutOfRange("alpha must be positive");
    const InnerSolution s = solve_inner(sample, alpha);
    if (s.draw <= 0.0) return 0.0;
    return alpha / s.zeta;
}

double lambda_of_alpha(const ProblemSpec& spec, double alpha, const GeneralSEOptions& opts) {
    McSample sample(spec, opts);
    return lambda_of_alpha(sample, alpha);
}

double calibrate_alpha(const McSample& sample, double lambda) {
    if (!(lambda > 0.0)) throw OutOfRange("lambda must be positive");
    const double amin = alpha_min(sample);
    double lo = sample.spec().gamma_w > 1.0 ? amin * (1.0 + 1e-7) : 1e-10;
    auto h = [&](double a) {
        try {
            return lambda_of_alpha(sample, a) - lambda;
        } catch (const AlphaBelowMin&) {
            return -lambda;  // below the feasible range maps to lambda = 0
        }
    };
    double hi = std::max(1.0, 2.0 * amin);
    int guard = 0;
    while (h(hi) < 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw BracketFailure("calibrate_alpha: no upper bracket");
    }
    if (h(lo) > 0.0) throw BracketFailure("calibrate_alpha: lower endpoint does not bracket");
    return brent_root(h, lo, hi, 1e-12);
}

double calibrate_alpha(const ProblemSpec& spec, double lambda, const GeneralSEOptions& opts) {
    McSample sample(spec, opts);
    return calibrate_alpha(sample, lambda);
}

GeneralSEFixedPoint solve_general_l1_se(const ProblemSpec& spec, double lambda,
                                        const GeneralSEOptions& opts) {
    if (!(lambda > 0.0)) throw OutOfRange("lambda must be positive");
    McSample sample(spec, opts);
    const double alpha = calibrate_alpha(sample, lambda);
    const InnerSolution s = solve_inner(sample, alpha);
    if (s.draw <= 0.0) throw NoConvergence("divergence clamp active at calibrated alpha");

    GeneralSEFixedPoint fp;
    fp.alpha = alpha;
    fp.lambda = lambda;
    fp.b_star = 1.0 / s.draw - 1.0;
    fp.tau_star = (1.0 + fp.b_star) / s.zeta;
    fp.p_mc = opts.p_mc;
    fp.reps = opts.reps;
    fp.seed = opts.seed;
    const double calib_residual = std::abs(alpha * fp.tau_star * s.draw - lambda);
    fp.residual = std::max(s.f_residual, calib_residual / std::max(1.0, lambda));
    if (fp.residual > opts.residual_tol)
        throw NoConvergence("general L1 state evolution residual above tolerance");
    return fp;
}

GeneralL1Risk general_l1_risk(const ProblemSpec& spec, double lambda, const GeneralSEFixedPoint& fp,
                              const GeneralSEOptions& opts) {
    McSample sample(spec, opts);
    const CovarianceModel& cov = sample.covariance();
    const int reps = opts.reps;
    const int p = opts.p_mc;
    const double zeta = (1.0 + fp.b_star) / fp.tau_star;
    const double tau = fp.tau_star;

    Eigen::VectorXd mse(reps), num(reps), den_signal(reps), den_eta(reps);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r) {
        ProxProblem problem{&cov, sample.whitened_noise().col(r) + zeta * sample.signals().col(r),
                            fp.alpha, std::max(p, 2000)};
        const Eigen::VectorXd eta = tau * prox_sigma(problem).w;
        const Eigen::VectorXd b0 = sample.signals().col(r);
        const Eigen::VectorXd diff = eta - b0;
        mse[r] = cov.quad_form(diff) / p;
        num[r] = b0.dot(cov.apply(eta)) / p;
        den_signal[r] = cov.quad_form(b0) / p;
        den_eta[r] = cov.quad_form(eta) / p;
    }

    auto mean_of = [&](const Eigen::VectorXd& x) { return x.mean(); };
    auto se_of = [&](const Eigen::VectorXd& x) {
        const double m = x.mean();
        double acc = 0.0;
        for (int r = 0; r < reps; ++r) acc += (x[r] - m) * (x[r] - m);
        return std::sqrt(acc / (reps - 1.0) / reps);
    };

    GeneralL1Risk out;
    out.lambda = lambda;
    out.alpha = fp.alpha;
    out.mse = mean_of(mse);
    out.mse_se = se_of(mse);

    auto r2_of = [&](double n, double d1, double d2) {
        return d1 > 0.0 && d2 > 0.0 ? spec.h2_s * n * n / (d1 * d2) : 0.0;
    };
    out.r2 = r2_of(mean_of(num), mean_of(den_signal), mean_of(den_eta));

    // jackknife standard error for the ratio statistic
    const double sn = num.sum(), s1 = den_signal.sum(), s2 = den_eta.sum();
    Eigen::VectorXd loo(reps);
    for (int r = 0; r < reps; ++r)
        loo[r] = r2_of((sn - num[r]) / (reps - 1.0), (s1 - den_signal[r]) / (reps - 1.0),
                       (s2 - den_eta[r]) / (reps - 1.0));
    const double loo_mean = loo.mean();
    double acc = 0.0;
    for (int r = 0; r < reps; ++r) acc += (loo[r] - loo_mean) * (loo[r] - loo_mean);
    out.r2_se = std::sqrt(acc * (reps - 1.0) / reps);
    return out;
}

}  // namespace ampr
