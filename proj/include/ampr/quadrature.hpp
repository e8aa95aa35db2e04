#pragma once

#include <functional>
#include <vector>

#include "ampr/prior.hpp"

namespace ampr {

// Quadrature rule against the standard normal weight:
// sum_i weights[i] f(nodes[i]) ~ E f(Z), Z ~ N(0,1).
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 0;

    // Gauss-Hermite (rescaled to unit variance): exact for polynomials up
    // to degree 2*order - 1. The default rule for smooth integrands.
    static Quadrature gauss_hermite(int order);

    // Composite Gauss-Legendre over [-z_max, z_max] with `panels` panels of
    // `panel_order` points each. Slower to converge per node on smooth
    // integrands than Gauss-Hermite but keeps high accuracy on integrands
    // with isolated kinks (soft-threshold moments), which stall plain
    // Gauss-Hermite near 1e-5.
    static Quadrature composite_normal(int panels = 400, int panel_order = 12, double z_max = 10.0);

    double expect(const std::function<double(double)>& f) const;
};

// Cached Gauss-Hermite rule (per order, per thread).
const Quadrature& cached_gauss_hermite(int order);

// E f(z, beta_bar) over z ~ N(0,1) independent of beta_bar ~ prior,
// evaluated as a tensor product: `quad` handles the z axis, Gaussian
// slab components of the prior get a Gauss-Hermite axis of the same
// order as `quad` (capped at 96), Dirac atoms are exact.
// Throws NonFinite if f produces NaN/Inf at a node.
double expect_2d(const SignalPrior& prior, const Quadrature& quad,
                 const std::function<double(double, double)>& f);

// E g(beta_bar) over the prior alone (atoms exact, Gaussian slabs by the
// given rule; Gauss-Hermite 96 when omitted). Integrands with features
// narrower than the Gauss-Hermite node spacing need a composite rule.
double expect_prior(const SignalPrior& prior, const std::function<double(double)>& g);
double expect_prior(const SignalPrior& prior, const std::function<double(double)>& g,
                    const Quadrature& slab);

}  // namespace ampr
