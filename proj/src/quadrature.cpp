#include "ampr/quadrature.hpp"

#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "ampr/errors.hpp"

namespace ampr {

Quadrature Quadrature::gauss_hermite(int order) {
    if (order < 1) throw OutOfRange("quadrature order must be at least 1");
    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite
    // polynomials (orthogonal under N(0,1)); off-diagonal entries sqrt(k)
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double b = std::sqrt(static_cast<double>(k));
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    if (es.info() != Eigen::Success) throw NoConvergence("Gauss-Hermite eigensolve failed");

    Quadrature q;
    q.order = order;
    q.nodes.resize(order);
    q.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        q.nodes[i] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        q.weights[i] = v0 * v0;  // total mass of N(0,1) is 1
    }
    return q;
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

}  // namespace

Quadrature Quadrature::composite_normal(int panels, int panel_order, double z_max) {
    if (panels < 1 || panel_order < 2) throw OutOfRange("composite rule needs panels >= 1, order >= 2");
    std::vector<double> gx, gw;
    gauss_legendre(panel_order, gx, gw);

    Quadrature q;
    q.order = panels * panel_order;
    q.nodes.reserve(q.order);
    q.weights.reserve(q.order);
    const double h = 2.0 * z_max / panels;
    for (int pIdx = 0; pIdx < panels; ++pIdx) {
        const double a = -z_max + pIdx * h;
        const double mid = a + 0.5 * h;
        for (int j = 0; j < panel_order; ++j) {
            const double z = mid + 0.5 * h * gx[j];
            q.nodes.push_back(z);
            q.weights.push_back(0.5 * h * gw[j] * kInvSqrt2Pi * std::exp(-0.5 * z * z));
        }
    }
    return q;
}

const Quadrature& cached_gauss_hermite(int order) {
    thread_local std::map<int, Quadrature> cache;
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, Quadrature::gauss_hermite(order)).first;
    return it->second;
}

double Quadrature::expect(const std::function<double(double)>& f) const {
    double acc = 0.0;
    for (int i = 0; i < order; ++i) {
        const double v = f(nodes[i]);
        if (!std::isfinite(v)) throw NonFinite("integrand not finite at quadrature node");
        acc += weights[i] * v;
    }
    return acc;
}

double expect_prior(const SignalPrior& prior, const std::function<double(double)>& g) {
    return expect_prior(prior, g, cached_gauss_hermite(96));
}

double expect_prior(const SignalPrior& prior, const std::function<double(double)>& g,
                    const Quadrature& slab) {
    switch (prior.kind()) {
        case SignalPrior::Kind::BernoulliGaussian: {
            const double sb = std::sqrt(prior.sigma_beta2());
            return (1.0 - prior.kappa()) * g(0.0) +
                   prior.kappa() * slab.expect([&](double z) { return g(sb * z); });
        }
        case SignalPrior::Kind::DiscreteMixture: {
            double acc = 0.0;
            for (const auto& a : prior.atoms()) acc += a.weight * g(a.value);
            return acc;
        }
        case SignalPrior::Kind::GaussianMixture: {
            double acc = 0.0;
            for (const auto& c : prior.components()) {
                if (c.variance == 0.0) {
                    acc += c.weight * g(c.mean);
                } else {
                    const double sd = std::sqrt(c.variance);
                    acc += c.weight * slab.expect([&](double z) { return g(c.mean + sd * z); });
                }
            }
            return acc;
        }
    }
    return 0.0;
}

double expect_2d(const SignalPrior& prior, const Quadrature& quad,
                 const std::function<double(double, double)>& f) {
    auto expect_given_beta = [&](double beta) {
        return quad.expect([&](double z) { return f(z, beta); });
    };
    const Quadrature& slab = cached_gauss_hermite(std::min(quad.order, 96));

    switch (prior.kind()) {
        case SignalPrior::Kind::BernoulliGaussian: {
            const double kappa = prior.kappa();
            const double sb = std::sqrt(prior.sigma_beta2());
            double acc = (1.0 - kappa) * expect_given_beta(0.0);
            acc += kappa * slab.expect([&](double g) { return expect_given_beta(sb * g); });
            return acc;
        }
        case SignalPrior::Kind::DiscreteMixture: {
            double acc = 0.0;
            for (const auto& a : prior.atoms()) acc += a.weight * expect_given_beta(a.value);
            return acc;
        }
        case SignalPrior::Kind::GaussianMixture: {
            double acc = 0.0;
            for (const auto& c : prior.components()) {
                if (c.variance == 0.0) {
                    acc += c.weight * expect_given_beta(c.mean);
                } else {
                    const double sd = std::sqrt(c.variance);
                    acc += c.weight *
                           slab.expect([&](double g) { return expect_given_beta(c.mean + sd * g); });
                }
            }
            return acc;
        }
    }
    return 0.0;
}

}  // namespace ampr
