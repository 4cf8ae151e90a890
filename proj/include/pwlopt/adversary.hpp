#ifndef PWLOPT_ADVERSARY_HPP
#define PWLOPT_ADVERSARY_HPP

#include <string>
#include <vector>

#include "pwlopt/piecewise.hpp"
#include "pwlopt/rng.hpp"

namespace pwlopt::adversary {

using piecewise::UtilityCurve;

// Knobs of the smoothed instance generators; defaults match the harness
// configs. `B` is the parameter-domain right end for greedy families,
// `W` the size/value cap, `h_bound` the uniform range bound of the stream.
struct FamilyParams {
    int n = 10;
    double kappa = 2.0;
    double B = 10.0;
    double W = 8.0;
    double edge_p = 0.25;
    int n_buyers = 5;
};

struct Stream {
    std::vector<UtilityCurve> curves;
    double h_bound = 1.0;  // shared range bound of the whole stream
    double domain_lo = 0.0;
    double domain_hi = 1.0;
};

// T utility curves from the named smoothed family:
// knapsack | mwis | owr | pricing_1d | second_price_1d.
// owr draws a fixed max-cut instance once from the stream seed and a fresh
// Gaussian per round.
Stream adversary_smoothed(const std::string& family, int T, Rng& rng,
                          const FamilyParams& params = {});

enum class WeedSide { upper, lower };

// The two-threshold adversary on [0,1]: emits i.i.d. draws of u0 (1/2 below
// 1/2, 0 at or above) and u1 (1/2 below, 1 at or above), with u1 probability
// 1/2 + 1/(8 sqrt(T)) for the upper adversary and the bias flipped for the
// lower one.
Stream adversary_weed(int T, Rng& rng, WeedSide side = WeedSide::upper);

}  // namespace pwlopt::adversary

#endif
