#include "pwlopt/adversary.hpp"

#include <cmath>

#include "pwlopt/error.hpp"
#include "pwlopt/greedy.hpp"
#include "pwlopt/iqp.hpp"
#include "pwlopt/market.hpp"

namespace pwlopt::adversary {

namespace {

Stream knapsack_stream(int T, Rng& rng, const FamilyParams& p) {
    Stream s;
    s.domain_lo = 0.0;
    s.domain_hi = p.B;
    s.h_bound = static_cast<double>(p.n);  // values in (0,1], at most n packed
    for (int t = 0; t < T; ++t) {
        const auto inst = greedy::gen_knapsack_smoothed(p.n, p.kappa, p.W, rng);
        auto curve = greedy::knapsack_curve(inst, p.B);
        curve.h_bound = s.h_bound;
        s.curves.push_back(std::move(curve));
    }
    return s;
}

Stream mwis_stream(int T, Rng& rng, const FamilyParams& p) {
    Stream s;
    s.domain_lo = 0.0;
    s.domain_hi = p.B;
    s.h_bound = static_cast<double>(p.n);
    for (int t = 0; t < T; ++t) {
        const auto inst = greedy::gen_mwis_smoothed(p.n, p.kappa, p.edge_p, rng);
        auto curve = greedy::mwis_curve(inst, p.B);
        curve.h_bound = s.h_bound;
        s.curves.push_back(std::move(curve));
    }
    return s;
}

Stream owr_stream(int T, Rng& rng, const FamilyParams& p) {
    // one instance, fresh Gaussian per round: the rounding randomness alone
    // disperses the discontinuities
    const auto inst = iqp::gen_maxcut(p.n, p.edge_p, rng);
    const auto emb = iqp::sdp_embed(inst, std::min(p.n, 8), 300, 1e-7, rng);
    Stream s;
    s.domain_lo = 0.0;
    s.domain_hi = 1.5707963267948966;
    s.h_bound = inst.abs_sum();  // cut values lie in [0, total edge weight]
    for (int t = 0; t < T; ++t) {
        std::vector<double> z(2 * p.n);
        for (double& x : z) x = rng.normal();
        for (int i = 0; i < p.n; ++i) {
            if (z[p.n + i] == 0.0) z[p.n + i] = 1e-12;
        }
        auto curve = iqp::owr_curve(inst, emb, z);
        curve.h_bound = s.h_bound;
        s.curves.push_back(std::move(curve));
    }
    return s;
}

Stream pricing_stream(int T, Rng& rng, const FamilyParams& p, bool second_price) {
    Stream s;
    s.domain_lo = 0.0;
    s.domain_hi = p.W;
    s.h_bound = p.W;  // single item: revenue and welfare are at most W
    for (int t = 0; t < T; ++t) {
        const auto profile =
            market::gen_valuations(market::ValuationModel::additive, p.n_buyers, 1, p.kappa, p.W, rng);
        market::PriceAxis axis;
        axis.item = 0;
        axis.fixed_prices = {0.0};
        auto curve = market::curve_1d(
            profile, second_price ? market::Mechanism::second_price : market::Mechanism::posted_price,
            market::Objective::revenue, axis, p.W);
        curve.h_bound = s.h_bound;
        s.curves.push_back(std::move(curve));
    }
    return s;
}

}  // namespace

Stream adversary_smoothed(const std::string& family, int T, Rng& rng, const FamilyParams& params) {
    require(T >= 0, "BadParams", "T must be nonnegative");
    if (family == "knapsack") return knapsack_stream(T, rng, params);
    if (family == "mwis") return mwis_stream(T, rng, params);
    if (family == "owr") return owr_stream(T, rng, params);
    if (family == "pricing_1d") return pricing_stream(T, rng, params, false);
    if (family == "second_price_1d") return pricing_stream(T, rng, params, true);
    fail("UnknownFamily", "no such family: " + family);
}

Stream adversary_weed(int T, Rng& rng, WeedSide side) {
    require(T >= 16, "TooShort", "the bias 1/(8 sqrt(T)) needs T >= 16");
    using piecewise::Piece;
    const auto u0 = piecewise::make_piecewise(
        0.0, 1.0, {0.5}, {Piece::constant(0.0, 0.5, 0.5), Piece::constant(0.5, 1.0, 0.0)});
    const auto u1 = piecewise::make_piecewise(
        0.0, 1.0, {0.5}, {Piece::constant(0.0, 0.5, 0.5), Piece::constant(0.5, 1.0, 1.0)});

    const double bias = 1.0 / (8.0 * std::sqrt(static_cast<double>(T)));
    const double p_u1 = side == WeedSide::upper ? 0.5 + bias : 0.5 - bias;

    Stream s;
    s.domain_lo = 0.0;
    s.domain_hi = 1.0;
    s.h_bound = 1.0;
    for (int t = 0; t < T; ++t) {
        UtilityCurve curve;
        curve.fn = rng.bernoulli(p_u1) ? u1 : u0;
        curve.h_bound = 1.0;
        curve.instance_tag = "weed";
        s.curves.push_back(std::move(curve));
    }
    return s;
}

}  // namespace pwlopt::adversary
