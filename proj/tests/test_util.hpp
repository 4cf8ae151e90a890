#ifndef PWLOPT_TEST_UTIL_HPP
#define PWLOPT_TEST_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "pwlopt/piecewise.hpp"
#include "pwlopt/rng.hpp"

namespace testutil {

// Adaptive Simpson quadrature, independent of the closed-form integration
// path it is used to check.
inline double simpson(const std::function<double(double)>& f, double a, double b) {
    const double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                            double tol = 1e-12, int depth = 0) {
    const double m = 0.5 * (a + b);
    const double whole = simpson(f, a, b);
    const double halves = simpson(f, a, m) + simpson(f, m, b);
    if (depth > 40 || std::abs(whole - halves) < 15.0 * tol) {
        return halves + (halves - whole) / 15.0;
    }
    return adaptive_quad(f, a, m, 0.5 * tol, depth + 1) +
           adaptive_quad(f, m, b, 0.5 * tol, depth + 1);
}

// Integrates a piecewise function's exp(lambda*f) by quadrature, splitting at
// the breakpoints so the integrand is smooth per subinterval.
inline double quad_exp_integral(const pwlopt::piecewise::PiecewiseFn1D& fn, double lambda) {
    double total = 0.0;
    for (const auto& p : fn.pieces) {
        total += adaptive_quad([&](double x) { return std::exp(lambda * p.value_at(x)); }, p.lo, p.hi);
    }
    return total;
}

// Kolmogorov-Smirnov distance of a sample against a continuous CDF.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double c = cdf(sample[i]);
        d = std::max(d, std::abs(c - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - c));
    }
    return d;
}

// Asymptotic p-value of the one-sample KS statistic.
inline double ks_p_value(double d, std::size_t n) {
    const double rt = std::sqrt(static_cast<double>(n));
    const double lambda = (rt + 0.12 + 0.11 / rt) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        p += sign * 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
        sign = -sign;
    }
    return std::clamp(p, 0.0, 1.0);
}

inline std::vector<double> grid(double lo, double hi, int points) {
    std::vector<double> xs;
    xs.reserve(points);
    for (int i = 0; i < points; ++i) {
        xs.push_back(lo + (hi - lo) * (i + 0.5) / points);
    }
    return xs;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace testutil

#endif
