#ifndef PWLOPT_PRIVACY_HPP
#define PWLOPT_PRIVACY_HPP

#include <cstddef>
#include <vector>

#include "pwlopt/piecewise.hpp"
#include "pwlopt/rng.hpp"

namespace pwlopt::privacy {

using piecewise::UtilityCurve;

// Exponential mechanism over an interval: an exact sample from the density
// proportional to exp(eps/(2H) * sum_i u_i(rho)). Sensitivity is fixed at the
// upper bound H/n so the privacy guarantee is unconditional.
double exp_mech_1d(const std::vector<UtilityCurve>& curves, double eps, double h_bound, Rng& rng);

// Finite exponential mechanism over a net: index i is chosen with probability
// proportional to exp(eps*n/(2H) * avg_utility[i]). Equals the exponential
// mechanism with sensitivity H/n on the discretized outcome set.
std::size_t exp_mech_grid(const std::vector<double>& avg_utilities, double eps, double h_bound,
                          int n_functions, Rng& rng);

// Explicit-constant suboptimality bound of the 1-d mechanism's output:
// (2H/(n eps)) (d ln(R/w) + ln(1/zeta)) + L w + H k / n.
double utility_bound(double eps, double zeta, double h_bound, int d, double R, double w, double k,
                     double L, int n_functions);

// Exact privacy audit: both output densities are computed in closed form on
// the common refinement of the two summed curves' pieces, and the result is
// the max over refined pieces of |ln(P_A(piece) / P_B(piece))|. For
// exp_mech_1d on neighboring multisets this never exceeds eps.
double privacy_ratio_check(const std::vector<UtilityCurve>& curves_a,
                           const std::vector<UtilityCurve>& curves_b, double eps);

}  // namespace pwlopt::privacy

#endif
