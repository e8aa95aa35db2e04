#pragma once

#include <cmath>

namespace ampr {

inline double soft_threshold(double v, double theta) {
    if (v > theta) return v - theta;
    if (v < -theta) return v + theta;
    return 0.0;
}

inline double soft_threshold_derivative(double v, double theta) {
    return std::abs(v) > theta ? 1.0 : 0.0;
}

// Closed-form Gaussian moments of the soft-threshold operator. All take a
// centered normal V ~ N(0, sd^2) and a threshold theta >= 0.
namespace gauss {

inline double sq_2pi() { return 0.79788456080286535588;  /* sqrt(2/pi) */ }

// E eta(V, theta)^2
inline double soft_sq_moment(double sd, double theta) {
    if (sd <= 0.0) return 0.0;
    const double r = theta / (std::sqrt(2.0) * sd);
    return (sd * sd + theta * theta) * std::erfc(r) -
           sq_2pi() * theta * sd * std::exp(-r * r);
}

// P(|V| > theta) = E eta'(V, theta)
inline double active_probability(double sd, double theta) {
    if (sd <= 0.0) return 0.0;
    return std::erfc(theta / (std::sqrt(2.0) * sd));
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double normal_pdf(double x) { return 0.3989422804014326779 * std::exp(-0.5 * x * x); }

// E eta(Y, theta) for Y ~ N(mean, sd^2)
inline double soft_mean(double mean, double sd, double theta) {
    if (sd <= 0.0) return soft_threshold(mean, theta);
    const double a = (mean - theta) / sd;
    const double b = (mean + theta) / sd;
    return (mean - theta) * normal_cdf(a) + sd * normal_pdf(a) +
           (mean + theta) * normal_cdf(-b) - sd * normal_pdf(b);
}

// Noncentered variants: Y ~ N(mean, sd^2).
inline double active_probability_nc(double mean, double sd, double theta) {
    if (sd <= 0.0) return std::abs(mean) > theta ? 1.0 : 0.0;
    return normal_cdf((mean - theta) / sd) + normal_cdf(-(mean + theta) / sd);
}

inline double soft_sq_moment_nc(double mean, double sd, double theta) {
    if (sd <= 0.0) {
        const double e = soft_threshold(mean, theta);
        return e * e;
    }
    auto upper_tail = [&](double m) {  // E [(Y - theta)^2 1{Y > theta}]
        const double a = (theta - m) / sd;
        return sd * sd * ((1.0 + a * a) * normal_cdf(-a) - a * normal_pdf(a));
    };
    return upper_tail(mean) + upper_tail(-mean);
}

}  // namespace gauss

}  // namespace ampr
