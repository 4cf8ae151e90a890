#ifndef PWLOPT_MARKET_HPP
#define PWLOPT_MARKET_HPP

#include <cstdint>
#include <vector>

#include "pwlopt/piecewise.hpp"
#include "pwlopt/rng.hpp"

namespace pwlopt::market {

using piecewise::UtilityCurve;

enum class ValuationModel { additive, unit_demand, general };

// Buyer valuations over m items. Additive and unit-demand store per-item
// values; general stores all 2^m bundle values per buyer (m <= 10), monotone
// with v(empty) = 0.
struct ValuationProfile {
    ValuationModel model = ValuationModel::additive;
    int n = 0;  // buyers
    int m = 0;  // items
    double W = 1.0;
    std::vector<std::vector<double>> item_values;    // [n][m] for additive / unit_demand
    std::vector<std::vector<double>> bundle_values;  // [n][2^m] for general

    double value(int buyer, std::uint32_t bundle_mask) const;
};

struct AuctionOutcome {
    std::vector<int> item_owner;    // -1 if unsold
    std::vector<double> payments;   // per buyer
    double revenue = 0.0;
    double welfare = 0.0;
};

// Posted prices, buyers in the given order; each buyer takes the bundle of
// remaining items maximizing value minus price (ties prefer buying, then the
// smallest bundle mask). Additive buyers decompose item by item with
// buy iff v >= price.
AuctionOutcome posted_price_run(const ValuationProfile& profile, const std::vector<double>& prices,
                                const std::vector<int>& ordering);

AuctionOutcome posted_price_run(const ValuationProfile& profile, const std::vector<double>& prices);

// Per-item second-price auction with anonymous reserves; additive model only
// (strategy-proofness), bids equal values. Winner = highest bid (ties by
// lowest buyer index) iff bid >= reserve; payment = max(second bid, reserve).
AuctionOutcome second_price_run(const ValuationProfile& bids, const std::vector<double>& reserves);

enum class Mechanism { posted_price, second_price };
enum class Objective { revenue, welfare };

// Which single price varies: one item's price (the others fixed), or one
// shared price on all items.
struct PriceAxis {
    int item = -1;  // -1 means a uniform shared price
    std::vector<double> fixed_prices;  // used for the non-varying items
};

// Exact utility-vs-price curve on [0, W] for the supported symbolic pairs
// (additive posted pricing; additive second price). Candidate breakpoints are
// the relevant valuation coordinates; within each candidate piece the
// allocation is fixed, so two simulator evaluations reconstruct the piece
// (constant for welfare, affine with integer slope for revenue).
UtilityCurve curve_1d(const ValuationProfile& profile, Mechanism mech, Objective objective,
                      const PriceAxis& axis, double W);

// Axis i gets the sorted list { v_j^{(t)}({i}) } over all buyers and
// instances; feeds per-axis interval counting and net refinement.
std::vector<std::vector<double>> additive_breakpoints(const std::vector<ValuationProfile>& instances);

// Smoothed generators. Additive: independent per-item uniform windows of
// width 1/kappa inside [0, W]. Unit-demand/general: a per-buyer base draw
// plus independent uniform jitter of width 1/kappa, which keeps every
// pairwise joint density bounded; general bundle values use a monotone
// coverage form built from the item draws.
ValuationProfile gen_valuations(ValuationModel model, int n, int m, double kappa, double W,
                                Rng& rng);

}  // namespace pwlopt::market

#endif
