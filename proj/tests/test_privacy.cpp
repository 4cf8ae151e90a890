#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pwlopt/adversary.hpp"
#include "pwlopt/dispersion.hpp"
#include "pwlopt/greedy.hpp"
#include "pwlopt/online.hpp"
#include "pwlopt/privacy.hpp"
#include "test_util.hpp"

using namespace pwlopt;
using namespace pwlopt::privacy;
using piecewise::Piece;
using piecewise::UtilityCurve;

namespace {

UtilityCurve threshold_curve(double at, double below, double at_or_above, double h = 1.0) {
    UtilityCurve c;
    c.fn = piecewise::make_piecewise(
        0.0, 1.0, {at}, {Piece::constant(0.0, at, below), Piece::constant(at, 1.0, at_or_above)});
    c.h_bound = h;
    return c;
}

UtilityCurve constant_curve(double value, double h = 1.0) {
    UtilityCurve c;
    c.fn = piecewise::constant_fn(0.0, 1.0, value);
    c.h_bound = h;
    return c;
}

}  // namespace

TEST_CASE("exp_mech_1d uniform cases") {
    Rng rng(1);
    // all curves constant: uniform output
    std::vector<UtilityCurve> flat(5, constant_curve(0.7));
    std::vector<double> sample;
    for (int i = 0; i < 10000; ++i) sample.push_back(exp_mech_1d(flat, 1.0, 1.0, rng));
    CHECK(testutil::ks_distance(sample, [](double x) { return x; }) < 0.05);

    // eps -> 0 limit is uniform regardless of the curves
    std::vector<UtilityCurve> sharp(20, threshold_curve(0.5, 0.0, 1.0));
    sample.clear();
    for (int i = 0; i < 10000; ++i) sample.push_back(exp_mech_1d(sharp, 1e-9, 1.0, rng));
    CHECK(testutil::ks_distance(sample, [](double x) { return x; }) < 0.05);
}

TEST_CASE("exp_mech_1d two-piece mass ratio") {
    // n identical thresholds with eps/(2H) * n * gap = ln 9: good side at 0.9
    Rng rng(2);
    const int n = 12;
    const double eps = 2.0 * std::log(9.0) / n;  // H = 1, gap = 1
    std::vector<UtilityCurve> curves(n, threshold_curve(0.5, 0.0, 1.0));
    int right = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        if (exp_mech_1d(curves, eps, 1.0, rng) >= 0.5) ++right;
    }
    CHECK(std::abs(right / static_cast<double>(draws) - 0.9) < 0.02);
}

TEST_CASE("exp_mech_grid softmax behavior") {
    Rng rng(3);
    // equal utilities: uniform over the net
    std::vector<int> hits(4, 0);
    for (int i = 0; i < 8000; ++i) ++hits[exp_mech_grid({0.3, 0.3, 0.3, 0.3}, 1.0, 1.0, 10, rng)];
    for (int h : hits) CHECK(std::abs(h / 8000.0 - 0.25) < 0.03);

    // two points with eps*n*gap/(2H) = ln 4: an 80/20 split
    const double gap = 0.2;
    const int n = 10;
    const double eps = 2.0 * std::log(4.0) / (n * gap);
    int first = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        if (exp_mech_grid({0.5, 0.3}, eps, 1.0, n, rng) == 0) ++first;
    }
    CHECK(std::abs(first / static_cast<double>(draws) - 0.8) < 0.02);

    // single point is always chosen
    for (int i = 0; i < 10; ++i) CHECK(exp_mech_grid({0.9}, 1.0, 1.0, 5, rng) == 0);
    CHECK_THROWS_AS(exp_mech_grid({}, 1.0, 1.0, 5, rng), Error);
}

TEST_CASE("exp_mech_grid matches exp_mech_1d piece selection on equal-length pieces") {
    // piecewise-constant sum with equal piece lengths: the grid mechanism on
    // one representative per piece has the same piece-hit distribution
    Rng rng(4);
    const int n = 6;
    std::vector<UtilityCurve> curves;
    curves.push_back(threshold_curve(0.25, 0.1, 0.6));
    curves.push_back(threshold_curve(0.5, 0.4, 0.2));
    curves.push_back(threshold_curve(0.75, 0.8, 0.3));
    for (int i = 3; i < n; ++i) curves.push_back(constant_curve(0.5));

    std::vector<piecewise::PiecewiseFn1D> fns;
    for (const auto& c : curves) fns.push_back(c.fn);
    const auto total = piecewise::sum(fns, 0.0, 1.0);
    REQUIRE(total.pieces.size() == 4);

    const double eps = 1.0;
    std::vector<double> avg_utils;
    for (const auto& p : total.pieces) avg_utils.push_back(p.intercept / n);

    const int draws = 20000;
    std::vector<int> hits_1d(4, 0), hits_grid(4, 0);
    for (int i = 0; i < draws; ++i) {
        ++hits_1d[total.piece_index(exp_mech_1d(curves, eps, 1.0, rng))];
        ++hits_grid[exp_mech_grid(avg_utils, eps, 1.0, n, rng)];
    }
    // chi-square two-sample statistic over the 4 cells, 3 dof, 0.999 quantile ~ 16.3
    double chi2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double a = hits_1d[i], b = hits_grid[i];
        chi2 += (a - b) * (a - b) / (a + b);
    }
    CHECK(chi2 < 16.3);
}

TEST_CASE("utility_bound formula") {
    // k=0, L=0, R/w=e, zeta=e^{-1}: 2H(1+1)/(n eps) = 4H/(n eps)
    CHECK(utility_bound(1.0, std::exp(-1.0), 1.0, 1, std::exp(1.0), 1.0, 0.0, 0.0, 1) ==
          doctest::Approx(4.0));
    // w -> R kills the d-term
    const double near = utility_bound(1.0, 0.05, 1.0, 1, 1.0, 1.0 - 1e-12, 2.0, 3.0, 50);
    const double want = (2.0 / 50.0) * std::log(20.0) + 3.0 * (1.0 - 1e-12) + 2.0 / 50.0;
    CHECK(near == doctest::Approx(want));
    CHECK_THROWS_AS(utility_bound(1.0, 0.05, 1.0, 1, 0.5, 0.5, 0.0, 0.0, 1), Error);
}

TEST_CASE("privacy_ratio_check exact guarantees") {
    std::vector<UtilityCurve> base;
    for (int i = 0; i < 8; ++i) base.push_back(threshold_curve(0.1 * (i + 1), 0.2, 0.9));

    // identical multisets: ratio 0
    CHECK(privacy_ratio_check(base, base, 1.0) == doctest::Approx(0.0));

    // one constant-gap curve replaced: the analytic ratio never exceeds eps
    for (double eps : {0.1, 1.0}) {
        auto other = base;
        other.back() = constant_curve(1.0);
        const double ratio = privacy_ratio_check(base, other, eps);
        CHECK(ratio <= eps + 1e-9);
        CHECK(ratio > 0.0);
    }

    // closed-form check: single curve {0 vs 1} against {0 vs 0}:
    // the log-ratio of the good piece is eps/2 - ln Z_A + ln Z_B
    {
        std::vector<UtilityCurve> a = {threshold_curve(0.5, 0.0, 1.0)};
        std::vector<UtilityCurve> b = {constant_curve(0.0)};
        const double eps = 1.0;
        const double za = 0.5 + 0.5 * std::exp(eps / 2.0);
        const double ratio = privacy_ratio_check(a, b, eps);
        const double right_piece = std::abs(std::log((0.5 * std::exp(eps / 2.0) / za) / 0.5));
        const double left_piece = std::abs(std::log((0.5 / za) / 0.5));
        CHECK(ratio == doctest::Approx(std::max(right_piece, left_piece)));
    }

    // differing in two curves is not a neighboring pair
    auto far = base;
    far[0] = constant_curve(0.3);
    far[1] = constant_curve(0.6);
    CHECK_THROWS_AS(privacy_ratio_check(base, far, 1.0), Error);
}

TEST_CASE("private forecaster rounds are per-round exponential mechanisms") {
    // with lambda = eps/(4H sqrt(2T ln(1/delta))), each round's sampling
    // density is the exponential mechanism at eps' = eps/(2 sqrt(2T ln(1/delta))),
    // so the per-round ratio on neighboring prefixes stays within eps'
    const double eps = 0.8, delta = 0.05;
    const int T = 12;
    adversary::FamilyParams params;
    params.n = 6;
    params.kappa = 2.0;
    params.B = 5.0;
    params.W = 4.0;
    Rng rng(333);
    auto stream_a = adversary::adversary_smoothed("knapsack", T, rng, params);
    auto stream_b = stream_a.curves;
    Rng alt(334);
    stream_b[4] = adversary::adversary_smoothed("knapsack", 1, alt, params).curves[0];
    stream_b[4].h_bound = stream_a.h_bound;

    const double eps_round = eps / (2.0 * std::sqrt(2.0 * T * std::log(1.0 / delta)));
    const double lambda = online::lambda_private(eps, delta, T, stream_a.h_bound);
    CHECK(lambda == doctest::Approx(eps_round / (2.0 * stream_a.h_bound)));
    for (int t = 1; t <= T; ++t) {
        const std::vector<UtilityCurve> prefix_a(stream_a.curves.begin(),
                                                 stream_a.curves.begin() + t);
        const std::vector<UtilityCurve> prefix_b(stream_b.begin(), stream_b.begin() + t);
        const double ratio = privacy_ratio_check(prefix_a, prefix_b, eps_round);
        CHECK(ratio <= eps_round + 1e-9);
        if (t <= 4) CHECK(ratio == 0.0);  // prefixes identical before the swap
    }
}

TEST_CASE("exp_mech_1d suboptimality within utility_bound on smoothed curves") {
    // 60 quick trials here; the 400-trial gate runs in the acceptance suite
    int ok = 0;
    const int trials = 60;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(500 + trial);
        adversary::FamilyParams params;
        params.n = 6;
        params.kappa = 2.0;
        params.B = 5.0;
        params.W = 4.0;
        auto stream = adversary::adversary_smoothed("knapsack", 100, rng, params);
        const double R = stream.domain_hi - stream.domain_lo;
        const double eps = 1.0;

        Rng mech(900 + trial);
        const double rho_hat = exp_mech_1d(stream.curves, eps, stream.h_bound, mech);

        std::vector<piecewise::PiecewiseFn1D> fns;
        for (const auto& c : stream.curves) fns.push_back(c.fn);
        const auto total = piecewise::sum(fns, stream.domain_lo, stream.domain_hi);
        const double n = static_cast<double>(stream.curves.size());
        const double subopt =
            (piecewise::argmax(total).value - piecewise::eval(total, rho_hat)) / n;

        const auto profile = dispersion::empirical_profile(
            stream.curves, {0.25 / std::sqrt(n), 0.5 / std::sqrt(n), 1.0 / std::sqrt(n)});
        double bound = 1e100;
        for (std::size_t i = 0; i < profile.ws.size(); ++i) {
            bound = std::min(bound,
                             utility_bound(eps, 0.05, stream.h_bound, 1, R, profile.ws[i],
                                           profile.ks[i], 0.0, static_cast<int>(n)));
        }
        ok += subopt <= bound ? 1 : 0;
    }
    CHECK(ok >= static_cast<int>(0.95 * trials));
}
