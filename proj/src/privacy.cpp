#include "pwlopt/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pwlopt/error.hpp"

namespace pwlopt::privacy {

namespace {

using piecewise::PiecewiseFn1D;

PiecewiseFn1D summed(const std::vector<UtilityCurve>& curves) {
    require(!curves.empty(), "BadParams", "need at least one curve");
    std::vector<PiecewiseFn1D> fns;
    fns.reserve(curves.size());
    for (const auto& c : curves) fns.push_back(c.fn);
    return piecewise::sum(fns, curves[0].fn.lo, curves[0].fn.hi);
}

}  // namespace

double exp_mech_1d(const std::vector<UtilityCurve>& curves, double eps, double h_bound, Rng& rng) {
    require(eps > 0.0 && h_bound > 0.0, "BadParams", "need eps > 0 and H > 0");
    const PiecewiseFn1D total = summed(curves);
    return piecewise::sample_exp(total, eps / (2.0 * h_bound), rng);
}

std::size_t exp_mech_grid(const std::vector<double>& avg_utilities, double eps, double h_bound,
                          int n_functions, Rng& rng) {
    require(!avg_utilities.empty(), "EmptyNet", "net must be nonempty");
    require(eps > 0.0 && h_bound > 0.0 && n_functions >= 1, "BadParams",
            "need eps > 0, H > 0, n >= 1");
    const double scale = eps * n_functions / (2.0 * h_bound);
    double top = -std::numeric_limits<double>::infinity();
    for (double u : avg_utilities) top = std::max(top, scale * u);
    double total = 0.0;
    std::vector<double> mass(avg_utilities.size());
    for (std::size_t i = 0; i < avg_utilities.size(); ++i) {
        mass[i] = std::exp(scale * avg_utilities[i] - top);
        total += mass[i];
    }
    const double u = rng.uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        acc += mass[i];
        if (u < acc) return i;
    }
    return mass.size() - 1;
}

double utility_bound(double eps, double zeta, double h_bound, int d, double R, double w, double k,
                     double L, int n_functions) {
    require(R > w && w > 0.0, "BadGeometry", "need R > w > 0");
    require(eps > 0.0 && zeta > 0.0 && zeta < 1.0 && h_bound > 0.0 && d >= 1 && k >= 0.0 &&
                L >= 0.0 && n_functions >= 1,
            "BadParams", "invalid bound parameters");
    const double n = static_cast<double>(n_functions);
    return (2.0 * h_bound / (n * eps)) * (d * std::log(R / w) + std::log(1.0 / zeta)) + L * w +
           h_bound * k / n;
}

namespace {

// Multiset difference by structural equality of the underlying functions.
std::size_t multiset_excess(const std::vector<UtilityCurve>& a,
                            const std::vector<UtilityCurve>& b) {
    std::vector<bool> used(b.size(), false);
    std::size_t unmatched = 0;
    for (const auto& ca : a) {
        bool found = false;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!used[j] && ca.fn == b[j].fn) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) ++unmatched;
    }
    return unmatched;
}

}  // namespace

double privacy_ratio_check(const std::vector<UtilityCurve>& curves_a,
                           const std::vector<UtilityCurve>& curves_b, double eps) {
    require(!curves_a.empty() && !curves_b.empty(), "BadParams", "need nonempty multisets");
    require(multiset_excess(curves_a, curves_b) <= 1 && multiset_excess(curves_b, curves_a) <= 1,
            "NotNeighbors", "multisets must differ in at most one curve");

    double h_bound = 0.0;
    for (const auto& c : curves_a) h_bound = std::max(h_bound, c.h_bound);
    for (const auto& c : curves_b) h_bound = std::max(h_bound, c.h_bound);
    require(h_bound > 0.0, "BadParams", "curves must declare a positive range bound");
    const double lambda = eps / (2.0 * h_bound);

    const PiecewiseFn1D sum_a = summed(curves_a);
    const PiecewiseFn1D sum_b = summed(curves_b);
    require(sum_a.lo == sum_b.lo && sum_a.hi == sum_b.hi, "DomainMismatch",
            "both multisets must share a domain");

    // common refinement of both piece structures
    std::vector<double> cuts;
    cuts.push_back(sum_a.lo);
    cuts.insert(cuts.end(), sum_a.breakpoints.begin(), sum_a.breakpoints.end());
    cuts.insert(cuts.end(), sum_b.breakpoints.begin(), sum_b.breakpoints.end());
    cuts.push_back(sum_a.hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double log_za = piecewise::log_exp_integral(sum_a, lambda, sum_a.lo, sum_a.hi);
    const double log_zb = piecewise::log_exp_integral(sum_b, lambda, sum_b.lo, sum_b.hi);

    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double log_pa =
            piecewise::log_exp_integral(sum_a, lambda, cuts[i], cuts[i + 1]) - log_za;
        const double log_pb =
            piecewise::log_exp_integral(sum_b, lambda, cuts[i], cuts[i + 1]) - log_zb;
        worst = std::max(worst, std::abs(log_pa - log_pb));
    }
    return worst;
}

}  // namespace pwlopt::privacy
