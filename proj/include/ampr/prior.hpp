#pragma once

#include <cstdint>
#include <vector>

#include "ampr/rng.hpp"

namespace ampr {

// Scalar signal prior for the limiting per-coordinate law of the
// coefficient vector. Immutable after construction.
class SignalPrior {
public:
    enum class Kind { BernoulliGaussian, DiscreteMixture, GaussianMixture };

    struct Atom {
        double value;
        double weight;
    };

    struct Component {
        double weight;
        double mean;
        double variance;
    };

    static SignalPrior bernoulli_gaussian(double kappa, double sigma_beta2);
    static SignalPrior discrete_mixture(std::vector<Atom> atoms);
    static SignalPrior gaussian_mixture(std::vector<Component> components);

    Kind kind() const { return kind_; }
    double kappa() const { return kappa_; }
    double sigma_beta2() const { return sigma_beta2_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<Component>& components() const { return components_; }

    // E beta_bar^2; kappa * sigma_beta^2 exactly for Bernoulli-Gaussian
    double second_moment() const;

    // Fraction of mass away from zero (sparsity for Bernoulli-Gaussian).
    double nonzero_fraction() const;

    double sample(SplitMix64& rng) const;

private:
    SignalPrior() = default;
    void validate() const;

    Kind kind_ = Kind::BernoulliGaussian;
    double kappa_ = 0.0;
    double sigma_beta2_ = 0.0;
    std::vector<Atom> atoms_;
    std::vector<Component> components_;
};

}  // namespace ampr
