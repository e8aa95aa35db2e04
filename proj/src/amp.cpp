#include "ampr/amp.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "ampr/brent.hpp"
#include "ampr/errors.hpp"
#include "ampr/parallel.hpp"
#include "ampr/prox.hpp"
#include "ampr/rng.hpp"
#include "ampr/scalar_l1.hpp"
#include "ampr/soft_threshold.hpp"

namespace ampr {

AmpInit AmpInit::oracle(const ScalarSEFixedPoint& fp, std::uint64_t seed) {
    AmpInit init;
    init.kind = Kind::Oracle;
    init.fixed_point = fp;
    init.oracle_seed = seed;
    return init;
}

AmpInit AmpInit::custom(const Eigen::VectorXd& beta_scaled) {
    AmpInit init;
    init.kind = Kind::Custom;
    init.beta0 = beta_scaled;
    return init;
}

namespace {

constexpr double kDivergenceGuard = 1e8;

// Sigma-metric prox of the AMP argument; elementwise for diagonal Sigma.
Eigen::VectorXd amp_prox(const CovarianceModel& sigma, const Eigen::VectorXd& v, double theta,
                         int& active_count) {
    if (sigma.kind() != CovarianceModel::Kind::DenseSPD) {
        const Eigen::Index p = v.size();
        Eigen::VectorXd w(p);
        active_count = 0;
        const bool identity = sigma.is_identity();
        for (Eigen::Index j = 0; j < p; ++j) {
            const double th = identity ? theta : theta / sigma.eigenvalues()[j];
            w[j] = soft_threshold(v[j], th);
            if (w[j] != 0.0) ++active_count;
        }
        return w;
    }
    ProxProblem problem{&sigma, v, theta, static_cast<int>(v.size())};
    ProxSolution sol = prox_sigma(problem);
    active_count = div_eta(sol);
    return std::move(sol.w);
}

struct LassoInitState {
    Eigen::VectorXd beta;
    Eigen::VectorXd r;
    double b = 0.0;
};

LassoInitState make_lasso_init(const SyntheticDataset& data, double lambda, const AmpInit& init) {
    const int p = data.p();
    const int n_w = data.n_w();
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n_w + data.n_x()));

    LassoInitState s;
    switch (init.kind) {
        case AmpInit::Kind::Zero:
            s.beta = Eigen::VectorXd::Zero(p);
            s.r = Eigen::VectorXd::Zero(n_w);
            s.b = 0.0;
            return s;
        case AmpInit::Kind::Oracle: {
            const ScalarSEFixedPoint& fp = init.fixed_point;
            SplitMix64 rng(derive_seed(init.oracle_seed, 0x6f7261636cULL));
            Eigen::VectorXd z(p);
            for (int j = 0; j < p; ++j) z[j] = rng.next_gaussian();
            const Eigen::VectorXd arg = fp.tau_star * data.sigma.apply_inv_sqrt(z) +
                                        (1.0 + fp.b_star) * std::sqrt(double(p)) * data.beta0;
            int active = 0;
            s.beta = amp_prox(data.sigma, arg, lambda * (1.0 + fp.b_star), active);
            s.b = fp.b_star;
            break;
        }
        case AmpInit::Kind::Custom: {
            if (init.beta0.size() != p) throw DimensionTooSmall("custom AMP init dimension mismatch");
            s.beta = init.beta0;
            int active = 0;
            for (int j = 0; j < p; ++j)
                if (s.beta[j] != 0.0) ++active;
            if (active >= n_w) throw InfeasibleRegime("custom init active set saturates n_w");
            s.b = static_cast<double>(active) / (n_w - active);
            break;
        }
    }
    // stationarity relation (1 - b/(1+b)) r = W beta / sqrt(N)
    s.r = (1.0 + s.b) * inv_sqrt_n * kernels::matvec(data.w, s.beta);
    return s;
}

}  // namespace

AmpRun run_ref_lasso_amp(const SyntheticDataset& data, double lambda, int t_max,
                         const AmpInit& init) {
    if (!(lambda > 0.0)) throw OutOfRange("lambda must be positive");
    const int p = data.p();
    const double n_x = data.n_x();
    const double n_w = data.n_w();
    const double sqrt_n = std::sqrt(n_x + n_w);
    const Eigen::VectorXd beta0_scaled = std::sqrt(double(p)) * data.beta0;
    const Eigen::VectorXd xty = kernels::matvec_t(data.x, data.y_x) *
                                (std::sqrt(double(p)) / n_x);

    LassoInitState st = make_lasso_init(data, lambda, init);

    AmpRun run;
    run.states.push_back({st.beta, st.r, st.b, 0, std::numeric_limits<double>::quiet_NaN()});
    for (int t = 0; t < t_max; ++t) {
        const Eigen::VectorXd wtr = kernels::matvec_t(data.w, st.r);
        const Eigen::VectorXd arg = -(sqrt_n / n_w) * data.sigma.apply_inv(wtr) +
                                    (1.0 + st.b) * data.sigma.apply_inv(xty) + st.beta;
        const double tau2_emp =
            data.sigma.quad_form(arg - (1.0 + st.b) * beta0_scaled) / p;

        int active = 0;
        Eigen::VectorXd beta_next = amp_prox(data.sigma, arg, lambda * (1.0 + st.b), active);
        const double b_next = (1.0 + st.b) * static_cast<double>(active) / n_w;
        Eigen::VectorXd r_next = kernels::matvec(data.w, beta_next) / sqrt_n +
                                 (b_next / (1.0 + st.b)) * st.r;

        st.beta = std::move(beta_next);
        st.r = std::move(r_next);
        st.b = b_next;
        run.states.push_back({st.beta, st.r, st.b, t + 1, tau2_emp});
        if (st.beta.cwiseAbs().maxCoeff() > kDivergenceGuard) {
            run.diverged = true;
            break;
        }
    }
    return run;
}

double ridge_c_next(const CovarianceModel& sigma, double lambda, double gamma_w, double c_prev) {
    const auto& evals = sigma.eigenvalues();
    const double p = static_cast<double>(evals.size());
    auto gap = [&](double c) {
        const double theta = lambda * (1.0 + c);
        double trace = 0.0;
        for (int i = 0; i < evals.size(); ++i) trace += evals[i] / (evals[i] + theta);
        return c / (1.0 + c_prev) - (gamma_w / p) * trace;
    };
    double hi = 1.0;
    int guard = 0;
    while (gap(hi) < 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw NoConvergence("ridge c recursion bracket failed");
    }
    return brent_root(gap, 0.0, hi, 1e-15);
}

AmpRun run_ref_ridge_amp(const SyntheticDataset& data, double lambda, int t_max,
                         const AmpInit& init) {
    if (!(lambda > 0.0)) throw OutOfRange("lambda must be positive");
    const int p = data.p();
    const double n_x = data.n_x();
    const double n_w = data.n_w();
    const double gamma_w = p / n_w;
    const double sqrt_n = std::sqrt(n_x + n_w);
    const Eigen::VectorXd beta0_scaled = std::sqrt(double(p)) * data.beta0;
    const Eigen::VectorXd xty = kernels::matvec_t(data.x, data.y_x) *
                                (std::sqrt(double(p)) / n_x);
    const CovarianceModel& sigma = data.sigma;

    auto resolvent = [&](const Eigen::VectorXd& v, double c) {
        const double theta = lambda * (1.0 + c);
        if (sigma.is_identity()) return Eigen::VectorXd((1.0 / (1.0 + theta)) * v);
        const Eigen::VectorXd scale =
            sigma.eigenvalues().array() / (sigma.eigenvalues().array() + theta);
        if (sigma.kind() == CovarianceModel::Kind::Spectrum)
            return Eigen::VectorXd(scale.cwiseProduct(v));
        return sigma.from_eigenbasis(scale.cwiseProduct(sigma.to_eigenbasis(v)));
    };

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(data.n_w());
    double c = 0.0;
    if (init.kind == AmpInit::Kind::Oracle) {
        // fixed_point carries (rho_*, c_*) in (tau_star, b_star)
        const ScalarSEFixedPoint& fp = init.fixed_point;
        SplitMix64 rng(derive_seed(init.oracle_seed, 0x6f7261636cULL));
        Eigen::VectorXd z(p);
        for (int j = 0; j < p; ++j) z[j] = rng.next_gaussian();
        const Eigen::VectorXd arg =
            fp.tau_star * sigma.apply_inv_sqrt(z) + (1.0 + fp.b_star) * beta0_scaled;
        c = fp.b_star;
        beta = resolvent(arg, c);
        r = (1.0 + c) / sqrt_n * kernels::matvec(data.w, beta);
    } else if (init.kind == AmpInit::Kind::Custom) {
        if (init.beta0.size() != p) throw DimensionTooSmall("custom AMP init dimension mismatch");
        beta = init.beta0;
        c = ridge_c_next(sigma, lambda, gamma_w, 0.0);
        r = (1.0 + c) / sqrt_n * kernels::matvec(data.w, beta);
    }

    AmpRun run;
    run.states.push_back({beta, r, c, 0, std::numeric_limits<double>::quiet_NaN()});
    for (int t = 0; t < t_max; ++t) {
        const Eigen::VectorXd wtr = kernels::matvec_t(data.w, r);
        const Eigen::VectorXd arg = -(sqrt_n / n_w) * sigma.apply_inv(wtr) +
                                    (1.0 + c) * sigma.apply_inv(xty) + beta;
        const double tau2_emp = sigma.quad_form(arg - (1.0 + c) * beta0_scaled) / p;

        Eigen::VectorXd beta_next = resolvent(arg, c);
        const double c_next = ridge_c_next(sigma, lambda, gamma_w, c);
        Eigen::VectorXd r_next =
            kernels::matvec(data.w, beta_next) / sqrt_n + (c_next / (1.0 + c)) * r;

        beta = std::move(beta_next);
        r = std::move(r_next);
        c = c_next;
        run.states.push_back({beta, r, c, t + 1, tau2_emp});
        if (beta.cwiseAbs().maxCoeff() > kDivergenceGuard) {
            run.diverged = true;
            break;
        }
    }
    return run;
}

Eigen::MatrixXd sample_goe(int p, std::uint64_t seed) {
    if (p < 2) throw DimensionTooSmall("GOE dimension must be at least 2");
    SplitMix64 rng(seed);
    const double sd = std::sqrt(1.0 / (2.0 * p));
    Eigen::MatrixXd g(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) g(i, j) = sd * rng.next_gaussian();
    return g + g.transpose();
}

namespace {

Eigen::MatrixXd hutchinson_onsager(const MatrixAmpProgram& program, int t, const Eigen::MatrixXd& x,
                                   SplitMix64& rng) {
    const Eigen::Index n = x.rows();
    const int q = program.q;
    const double eps = program.hutchinson_step;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(q, q);
    for (int probe = 0; probe < program.hutchinson_probes; ++probe) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.next_u64() & 1ULL ? 1.0 : -1.0;
        for (int s = 0; s < q; ++s) {
            Eigen::MatrixXd xp = x;
            Eigen::MatrixXd xm = x;
            xp.col(s) += eps * v;
            xm.col(s) -= eps * v;
            const Eigen::MatrixXd diff =
                (program.denoiser(t, xp) - program.denoiser(t, xm)) / (2.0 * eps);
            for (int r = 0; r < q; ++r) b(r, s) += v.dot(diff.col(r)) / n;
        }
    }
    return b / program.hutchinson_probes;
}

}  // namespace

MatrixAmpRun run_symmetric_matrix_amp(const MatrixAmpProgram& program, std::uint64_t seed,
                                      int t_max) {
    if (!program.denoiser) throw OutOfRange("matrix AMP program needs a denoiser");
    if (program.x0.cols() != program.q || program.coupling.rows() != program.coupling.cols() ||
        program.coupling.rows() != program.x0.rows())
        throw DimensionTooSmall("matrix AMP program dimensions are inconsistent");

    SplitMix64 rng(derive_seed(seed, 0x68757463ULL));
    MatrixAmpRun run;
    run.iterates.push_back(program.x0);

    Eigen::MatrixXd m_prev;  // m^{t-1}
    Eigen::MatrixXd x = program.x0;
    for (int t = 0; t < t_max; ++t) {
        const Eigen::MatrixXd m = program.denoiser(t, x);
        const Eigen::MatrixXd b = program.onsager ? program.onsager(t, x)
                                                  : hutchinson_onsager(program, t, x, rng);
        Eigen::MatrixXd x_next = program.coupling * m;
        if (m_prev.size() > 0) x_next.noalias() -= m_prev * b.transpose();
        m_prev = m;
        x = std::move(x_next);
        run.iterates.push_back(x);
        if (x.cwiseAbs().maxCoeff() > kDivergenceGuard) {
            run.diverged = true;
            break;
        }
    }
    return run;
}

namespace {

// E[eta(tau_a z_a + s_a beta, th_a) eta(tau_b z_b + s_b beta, th_b)] with
// E z_a z_b = cross / (tau_a tau_b); the inner conditional expectation is
// closed-form so only one kinked axis is integrated numerically.
double cross_product_moment(const SignalPrior& prior, double tau_a, double tau_b, double cross,
                            double scale_a, double scale_b, double th_a, double th_b) {
    const double denom = tau_a * tau_b;
    double rho = denom > 0.0 ? cross / denom : 0.0;
    rho = std::min(1.0, std::max(-1.0, rho));
    thread_local Quadrature rule = Quadrature::composite_normal(48, 6, 8.0);

    auto conditional = [&](double za, double beta) {
        const double ua = tau_a * za + scale_a * beta;
        const double mean_b = tau_b * rho * za + scale_b * beta;
        const double sd_b = tau_b * std::sqrt(std::max(0.0, 1.0 - rho * rho));
        return soft_threshold(ua, th_a) * gauss::soft_mean(mean_b, sd_b, th_b);
    };

    switch (prior.kind()) {
        case SignalPrior::Kind::BernoulliGaussian: {
            const double kappa = prior.kappa();
            const double sb = std::sqrt(prior.sigma_beta2());
            const Quadrature& slab = cached_gauss_hermite(48);
            double atom = rule.expect([&](double z) { return conditional(z, 0.0); });
            double slab_val = slab.expect([&](double g) {
                return rule.expect([&](double z) { return conditional(z, sb * g); });
            });
            return (1.0 - kappa) * atom + kappa * slab_val;
        }
        default: {
            // discrete / gaussian mixtures reuse the generic 2-d reduction
            double acc = 0.0;
            if (prior.kind() == SignalPrior::Kind::DiscreteMixture) {
                for (const auto& a : prior.atoms())
                    acc += a.weight * rule.expect([&](double z) { return conditional(z, a.value); });
            } else {
                const Quadrature& slab = cached_gauss_hermite(48);
                for (const auto& c : prior.components()) {
                    const double sd = std::sqrt(c.variance);
                    acc += c.weight * slab.expect([&](double g) {
                        return rule.expect([&](double z) { return conditional(z, c.mean + sd * g); });
                    });
                }
            }
            return acc;
        }
    }
}

}  // namespace

SETrajectory se_recursion(const ProblemSpec& spec, double lambda, int t_max, double init_tau2,
                          double init_b, bool with_cross_terms) {
    if (!spec.covariance.is_identity())
        throw OutOfRange("se_recursion closed form requires identity covariance; use the MC path");
    if (!(init_tau2 > 0.0)) throw OutOfRange("initial tau^2 must be positive");
    const double m2 = spec.prior.second_moment();

    SETrajectory traj;
    traj.tau2.reserve(t_max + 1);
    traj.b.reserve(t_max + 1);
    traj.tau2.push_back(init_tau2);
    traj.b.push_back(init_b);
    if (with_cross_terms) traj.tau2_cross.push_back(init_tau2);

    for (int t = 0; t < t_max; ++t) {
        const double tau = std::sqrt(traj.tau2[t]);
        const double b = traj.b[t];
        const double one_b = 1.0 + b;
        const double zeta = one_b / tau;
        const double theta_scaled = lambda * zeta;  // threshold after dividing by tau

        const ScalarSEMoments mom = ref_lasso_moments(spec.prior, zeta, theta_scaled);
        const double tau2_next =
            spec.gamma_x * one_b * one_b * m2 / spec.h2_x + spec.gamma_w * tau * tau * mom.m2;
        traj.tau2.push_back(tau2_next);

        const double tau_next = std::sqrt(tau2_next);
        const double zeta_next = one_b / tau_next;
        const ScalarSEMoments mom_next = ref_lasso_moments(spec.prior, zeta_next, lambda * zeta_next);
        traj.b.push_back(one_b * spec.gamma_w * mom_next.active);

        if (with_cross_terms) {
            const double b_prev = t > 0 ? traj.b[t - 1] : init_b;
            const double tau_prev = std::sqrt(traj.tau2[std::max(0, t - 1)]);
            double prod;
            if (std::abs(traj.tau2_cross[t] - tau * tau_prev) < 1e-12 &&
                std::abs(tau - tau_prev) < 1e-12 && std::abs(b - b_prev) < 1e-12) {
                prod = tau * tau * ref_lasso_moments(spec.prior, zeta, theta_scaled).m2;
            } else {
                prod = cross_product_moment(spec.prior, tau, tau_prev, traj.tau2_cross[t], one_b,
                                            1.0 + b_prev, lambda * one_b, lambda * (1.0 + b_prev));
            }
            traj.tau2_cross.push_back(spec.gamma_x * one_b * (1.0 + b_prev) * m2 / spec.h2_x +
                                      spec.gamma_w * prod);
        }
    }
    return traj;
}

void export_trajectory_csv(const std::string& path, const AmpRun& run, const SETrajectory& se,
                           const Eigen::VectorXd* estimator_scaled) {
    std::ofstream out(path);
    if (!out) throw OutOfRange("cannot open trajectory file for writing: " + path);
    out.precision(17);
    out << "t,tau2_emp,tau2_se,b_t,dist_to_estimator\n";
    for (size_t t = 0; t < run.states.size(); ++t) {
        const AmpState& s = run.states[t];
        out << s.t << ",";
        if (std::isnan(s.tau2_emp))
            out << "";
        else
            out << s.tau2_emp;
        out << ",";
        if (t < se.tau2.size()) out << se.tau2[t];
        out << "," << s.b << ",";
        if (estimator_scaled != nullptr)
            out << (s.beta - *estimator_scaled).squaredNorm() / s.beta.size();
        out << "\n";
    }
}

}  // namespace ampr
