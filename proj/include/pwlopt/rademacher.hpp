#ifndef PWLOPT_RADEMACHER_HPP
#define PWLOPT_RADEMACHER_HPP

#include <optional>
#include <vector>

#include "pwlopt/piecewise.hpp"
#include "pwlopt/rng.hpp"

namespace pwlopt::rademacher {

using piecewise::UtilityCurve;

struct RademacherEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int n_sigma = 0;
};

// Empirical Rademacher complexity of the curve family: for each sign vector
// sigma the signed sum is formed exactly (piecewise) and its sup taken by
// argmax; the estimate averages sup_rho (1/N) sum_i sigma_i u_i(rho) over
// n_sigma draws.
RademacherEstimate empirical_rademacher(const std::vector<UtilityCurve>& curves, int n_sigma,
                                        Rng& rng);

// Upper-envelope report with constant 1 on each term (order comparison only):
// min( sqrt(d/N ln(R/w)) + L w + k/N , sqrt(pdim/N) ); the second branch only
// when a pseudo-dimension is supplied.
double rademacher_bound(int d, double R, double w, double L, double k, int N,
                        std::optional<double> pdim = std::nullopt);

}  // namespace pwlopt::rademacher

#endif
