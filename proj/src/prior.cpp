#include "ampr/prior.hpp"

#include <cmath>
#include <numeric>

#include "ampr/errors.hpp"

namespace ampr {

SignalPrior SignalPrior::bernoulli_gaussian(double kappa, double sigma_beta2) {
    SignalPrior p;
    p.kind_ = Kind::BernoulliGaussian;
    p.kappa_ = kappa;
    p.sigma_beta2_ = sigma_beta2;
    p.validate();
    return p;
}

SignalPrior SignalPrior::discrete_mixture(std::vector<Atom> atoms) {
    SignalPrior p;
    p.kind_ = Kind::DiscreteMixture;
    p.atoms_ = std::move(atoms);
    p.validate();
    return p;
}

SignalPrior SignalPrior::gaussian_mixture(std::vector<Component> components) {
    SignalPrior p;
    p.kind_ = Kind::GaussianMixture;
    p.components_ = std::move(components);
    p.validate();
    return p;
}

void SignalPrior::validate() const {
    switch (kind_) {
        case Kind::BernoulliGaussian:
            // kappa = 0 would make the signal identically zero, which the
            // asymptotic theory excludes (P(beta0 != 0) > 0 is required)
            if (!(kappa_ > 0.0 && kappa_ <= 1.0))
                throw OutOfRange("Bernoulli-Gaussian kappa must lie in (0, 1]");
            if (!(sigma_beta2_ > 0.0)) throw OutOfRange("sigma_beta2 must be positive");
            break;
        case Kind::DiscreteMixture: {
            if (atoms_.empty()) throw OutOfRange("discrete mixture needs at least one atom");
            double total = 0.0;
            for (const auto& a : atoms_) {
                if (a.weight < 0.0) throw OutOfRange("atom weight must be nonnegative");
                total += a.weight;
            }
            if (std::abs(total - 1.0) > 1e-12) throw OutOfRange("atom weights must sum to 1");
            break;
        }
        case Kind::GaussianMixture: {
            if (components_.empty()) throw OutOfRange("gaussian mixture needs at least one component");
            double total = 0.0;
            for (const auto& c : components_) {
                if (c.weight < 0.0) throw OutOfRange("component weight must be nonnegative");
                if (c.variance < 0.0) throw OutOfRange("component variance must be nonnegative");
                total += c.weight;
            }
            if (std::abs(total - 1.0) > 1e-12) throw OutOfRange("component weights must sum to 1");
            break;
        }
    }
}

double SignalPrior::second_moment() const {
    switch (kind_) {
        case Kind::BernoulliGaussian:
            return kappa_ * sigma_beta2_;
        case Kind::DiscreteMixture: {
            double m2 = 0.0;
            for (const auto& a : atoms_) m2 += a.weight * a.value * a.value;
            return m2;
        }
        case Kind::GaussianMixture: {
            double m2 = 0.0;
            for (const auto& c : components_) m2 += c.weight * (c.mean * c.mean + c.variance);
            return m2;
        }
    }
    return 0.0;
}

double SignalPrior::nonzero_fraction() const {
    switch (kind_) {
        case Kind::BernoulliGaussian:
            return kappa_;
        case Kind::DiscreteMixture: {
            double w = 0.0;
            for (const auto& a : atoms_)
                if (a.value != 0.0) w += a.weight;
            return w;
        }
        case Kind::GaussianMixture: {
            double w = 0.0;
            for (const auto& c : components_)
                if (c.variance > 0.0 || c.mean != 0.0) w += c.weight;
            return w;
        }
    }
    return 0.0;
}

double SignalPrior::sample(SplitMix64& rng) const {
    switch (kind_) {
        case Kind::BernoulliGaussian: {
            double u = rng.next_uniform();
            double g = rng.next_gaussian();  // always consume, keeps stream aligned
            if (u < kappa_) return std::sqrt(sigma_beta2_) * g;
            return 0.0;
        }
        case Kind::DiscreteMixture: {
            double u = rng.next_uniform();
            double acc = 0.0;
            for (const auto& a : atoms_) {
                acc += a.weight;
                if (u <= acc) return a.value;
            }
            return atoms_.back().value;
        }
        case Kind::GaussianMixture: {
            double u = rng.next_uniform();
            double g = rng.next_gaussian();
            double acc = 0.0;
            for (const auto& c : components_) {
                acc += c.weight;
                if (u <= acc) return c.mean + std::sqrt(c.variance) * g;
            }
            const auto& last = components_.back();
            return last.mean + std::sqrt(last.variance) * g;
        }
    }
    return 0.0;
}

}  // namespace ampr
