#include "pwlopt/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pwlopt/error.hpp"

namespace pwlopt::market {

double ValuationProfile::value(int buyer, std::uint32_t bundle_mask) const {
    switch (model) {
        case ValuationModel::additive: {
            double total = 0.0;
            for (int i = 0; i < m; ++i) {
                if (bundle_mask & (1u << i)) total += item_values[buyer][i];
            }
            return total;
        }
        case ValuationModel::unit_demand: {
            double best = 0.0;
            for (int i = 0; i < m; ++i) {
                if (bundle_mask & (1u << i)) best = std::max(best, item_values[buyer][i]);
            }
            return best;
        }
        case ValuationModel::general:
            return bundle_values[buyer][bundle_mask];
    }
    return 0.0;
}

namespace {

void check_prices(const ValuationProfile& profile, const std::vector<double>& prices) {
    require(prices.size() == static_cast<std::size_t>(profile.m), "PriceCountMismatch",
            "need one price per item");
    for (double p : prices) require(p >= 0.0, "PriceCountMismatch", "prices must be nonnegative");
}

}  // namespace

AuctionOutcome posted_price_run(const ValuationProfile& profile, const std::vector<double>& prices,
                                const std::vector<int>& ordering) {
    check_prices(profile, prices);
    require(ordering.size() == static_cast<std::size_t>(profile.n), "PriceCountMismatch",
            "ordering must be a permutation of the buyers");
    {
        std::vector<bool> seen(profile.n, false);
        for (int b : ordering) {
            require(b >= 0 && b < profile.n && !seen[b], "PriceCountMismatch",
                    "ordering must be a permutation of the buyers");
            seen[b] = true;
        }
    }

    AuctionOutcome out;
    out.item_owner.assign(profile.m, -1);
    out.payments.assign(profile.n, 0.0);
    std::uint32_t remaining = (profile.m == 32) ? ~0u : ((1u << profile.m) - 1u);

    for (int buyer : ordering) {
        std::uint32_t chosen = 0;
        if (profile.model == ValuationModel::additive) {
            // item-by-item: take i iff v >= price (weak, ties prefer buying)
            for (int i = 0; i < profile.m; ++i) {
                if ((remaining & (1u << i)) && profile.item_values[buyer][i] >= prices[i]) {
                    chosen |= (1u << i);
                }
            }
        } else if (profile.model == ValuationModel::unit_demand) {
            // utility-maximizing bundle is a single item (or nothing) since
            // bundle value is a max and prices are nonnegative
            int best_item = -1;
            double best_util = 0.0;
            for (int i = 0; i < profile.m; ++i) {
                if (!(remaining & (1u << i))) continue;
                const double util = profile.item_values[buyer][i] - prices[i];
                if (util > best_util || (util == best_util && best_item < 0)) {
                    best_util = util;
                    best_item = i;
                }
            }
            if (best_item >= 0) chosen = 1u << best_item;
        } else {
            double best_util = 0.0;  // empty bundle
            for (std::uint32_t mask = remaining; mask != 0; mask = (mask - 1) & remaining) {
                double price = 0.0;
                for (int i = 0; i < profile.m; ++i) {
                    if (mask & (1u << i)) price += prices[i];
                }
                const double util = profile.value(buyer, mask) - price;
                // ties prefer buying over the empty bundle, then the lowest mask
                if (util > best_util ||
                    (util == best_util && (chosen == 0 || mask < chosen))) {
                    best_util = util;
                    chosen = mask;
                }
            }
        }
        if (chosen != 0) {
            double paid = 0.0;
            for (int i = 0; i < profile.m; ++i) {
                if (chosen & (1u << i)) {
                    paid += prices[i];
                    out.item_owner[i] = buyer;
                }
            }
            out.payments[buyer] = paid;
            out.revenue += paid;
            out.welfare += profile.value(buyer, chosen);
            remaining &= ~chosen;
        }
    }
    return out;
}

AuctionOutcome posted_price_run(const ValuationProfile& profile, const std::vector<double>& prices) {
    std::vector<int> ordering(profile.n);
    std::iota(ordering.begin(), ordering.end(), 0);
    return posted_price_run(profile, prices, ordering);
}

AuctionOutcome second_price_run(const ValuationProfile& bids, const std::vector<double>& reserves) {
    require(bids.model == ValuationModel::additive, "NonAdditive",
            "second-price item auctions are strategy proof for additive bidders only");
    check_prices(bids, reserves);

    AuctionOutcome out;
    out.item_owner.assign(bids.m, -1);
    out.payments.assign(bids.n, 0.0);
    for (int i = 0; i < bids.m; ++i) {
        int winner = 0;
        for (int j = 1; j < bids.n; ++j) {
            if (bids.item_values[j][i] > bids.item_values[winner][i]) winner = j;
        }
        const double top = bids.item_values[winner][i];
        if (top < reserves[i]) continue;
        double second = 0.0;
        for (int j = 0; j < bids.n; ++j) {
            if (j != winner) second = std::max(second, bids.item_values[j][i]);
        }
        const double payment = std::max(second, reserves[i]);
        out.item_owner[i] = winner;
        out.payments[winner] += payment;
        out.revenue += payment;
        out.welfare += top;
    }
    return out;
}

namespace {

double run_objective(const ValuationProfile& profile, Mechanism mech, Objective objective,
                     const std::vector<double>& prices) {
    const AuctionOutcome out = (mech == Mechanism::posted_price)
                                   ? posted_price_run(profile, prices)
                                   : second_price_run(profile, prices);
    return objective == Objective::revenue ? out.revenue : out.welfare;
}

}  // namespace

UtilityCurve curve_1d(const ValuationProfile& profile, Mechanism mech, Objective objective,
                      const PriceAxis& axis, double W) {
    require(W > 0.0, "BadParams", "W must be positive");
    require(profile.model == ValuationModel::additive, "UnsupportedCombination",
            "symbolic curves cover the additive model; use the grid path otherwise");
    if (mech == Mechanism::second_price) {
        require(axis.item >= 0 || profile.m == 1, "UnsupportedCombination",
                "second-price curves vary a single item's reserve");
    }

    const auto prices_at = [&](double rho) {
        std::vector<double> prices =
            axis.fixed_prices.empty() ? std::vector<double>(profile.m, 0.0) : axis.fixed_prices;
        require(prices.size() == static_cast<std::size_t>(profile.m), "PriceCountMismatch",
                "fixed prices must cover every item");
        if (axis.item < 0) {
            std::fill(prices.begin(), prices.end(), rho);
        } else {
            require(axis.item < profile.m, "BadParams", "axis item out of range");
            prices[axis.item] = rho;
        }
        return prices;
    };

    // candidate breakpoints: the valuation coordinates on the varying axes
    std::vector<double> bps;
    for (int j = 0; j < profile.n; ++j) {
        for (int i = 0; i < profile.m; ++i) {
            if (axis.item >= 0 && i != axis.item) continue;
            const double v = profile.item_values[j][i];
            if (v > 0.0 && v < W) bps.push_back(v);
        }
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

    // within a candidate piece the allocation is fixed, so the objective is
    // affine in rho; two interior evaluations pin it down and the slope is an
    // integer count of items sold at the varying price
    std::vector<piecewise::Piece> pieces;
    double lo = 0.0;
    for (std::size_t i = 0; i <= bps.size(); ++i) {
        const double hi = (i == bps.size()) ? W : bps[i];
        const double x1 = lo + (hi - lo) / 3.0, x2 = lo + 2.0 * (hi - lo) / 3.0;
        const double u1 = run_objective(profile, mech, objective, prices_at(x1));
        const double u2 = run_objective(profile, mech, objective, prices_at(x2));
        const double slope = std::round((u2 - u1) / (x2 - x1));
        if (slope == 0.0) {
            pieces.push_back(piecewise::Piece::constant(lo, hi, u1));
        } else {
            pieces.push_back(piecewise::Piece::affine(lo, hi, slope, u1 - slope * x1));
        }
        lo = hi;
    }

    UtilityCurve curve;
    curve.fn = piecewise::make_piecewise(0.0, W, std::move(bps), std::move(pieces));
    curve.h_bound = std::max(curve.fn.max_value(), 0.0);
    curve.instance_tag = mech == Mechanism::posted_price ? "posted_price" : "second_price";
    return curve;
}

std::vector<std::vector<double>> additive_breakpoints(
    const std::vector<ValuationProfile>& instances) {
    std::vector<std::vector<double>> axes;
    for (const auto& profile : instances) {
        require(profile.model == ValuationModel::additive, "NonAdditive",
                "axis-aligned breakpoints exist for additive valuations");
        if (axes.empty()) axes.resize(profile.m);
        require(axes.size() == static_cast<std::size_t>(profile.m), "DomainMismatch",
                "instances must agree on the number of items");
        for (int j = 0; j < profile.n; ++j) {
            for (int i = 0; i < profile.m; ++i) axes[i].push_back(profile.item_values[j][i]);
        }
    }
    for (auto& axis : axes) std::sort(axis.begin(), axis.end());
    return axes;
}

ValuationProfile gen_valuations(ValuationModel model, int n, int m, double kappa, double W,
                                Rng& rng) {
    require(n >= 1 && m >= 1, "BadParams", "need at least one buyer and one item");
    require(kappa * W >= 1.0, "BadParams", "window width 1/kappa must fit in [0, W]");
    require(model != ValuationModel::general || m <= 10, "BadParams",
            "general valuations enumerate 2^m bundles; m <= 10");

    ValuationProfile profile;
    profile.model = model;
    profile.n = n;
    profile.m = m;
    profile.W = W;
    const double width = 1.0 / kappa;

    profile.item_values.assign(n, std::vector<double>(m, 0.0));
    for (int j = 0; j < n; ++j) {
        // base draw correlates a buyer's items; the independent jitter keeps
        // each marginal (and each pairwise joint) density bounded
        const double base =
            (model == ValuationModel::additive) ? 0.0 : rng.uniform(0.0, W - width);
        for (int i = 0; i < m; ++i) {
            double v;
            if (model == ValuationModel::additive) {
                const double anchor = rng.uniform(0.0, W - width);
                v = anchor + width * rng.uniform01();
            } else {
                v = base * rng.uniform(0.25, 0.75) + width * rng.uniform01();
            }
            profile.item_values[j][i] = std::clamp(v, 0.0, W);
        }
    }

    if (model == ValuationModel::general) {
        profile.bundle_values.assign(n, std::vector<double>(std::size_t{1} << m, 0.0));
        for (int j = 0; j < n; ++j) {
            for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
                // monotone coverage form: W * (1 - prod (1 - v_i / W))
                double miss = 1.0;
                for (int i = 0; i < m; ++i) {
                    if (mask & (1u << i)) miss *= 1.0 - profile.item_values[j][i] / W;
                }
                profile.bundle_values[j][mask] = W * (1.0 - miss);
            }
        }
    }
    return profile;
}

}  // namespace pwlopt::market
