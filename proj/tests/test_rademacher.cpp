#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pwlopt/adversary.hpp"
#include "pwlopt/dispersion.hpp"
#include "pwlopt/rademacher.hpp"
#include "test_util.hpp"

using namespace pwlopt;
using namespace pwlopt::rademacher;
using piecewise::Piece;
using piecewise::UtilityCurve;

namespace {

UtilityCurve threshold_curve(double at, double below, double at_or_above) {
    UtilityCurve c;
    c.fn = piecewise::make_piecewise(
        0.0, 1.0, {at}, {Piece::constant(0.0, at, below), Piece::constant(at, 1.0, at_or_above)});
    c.h_bound = 1.0;
    return c;
}

}  // namespace

TEST_CASE("empirical_rademacher closed-form cases") {
    Rng rng(1);
    // all-zero curves: exactly zero
    std::vector<UtilityCurve> zeros(5);
    for (auto& c : zeros) {
        c.fn = piecewise::constant_fn(0.0, 1.0, 0.0);
        c.h_bound = 1.0;
    }
    CHECK(empirical_rademacher(zeros, 20, rng).mean == 0.0);

    // single threshold curve, N=1: sup_rho sigma*u equals 1 when sigma=+1 and
    // 0 when sigma=-1, so the estimate converges to 1/2
    const std::vector<UtilityCurve> single = {threshold_curve(0.5, 0.0, 1.0)};
    const auto est = empirical_rademacher(single, 4000, rng);
    CHECK(std::abs(est.mean - 0.5) <= 4.0 * est.std_error + 1e-9);

    // permutation invariance given the same sigma stream
    std::vector<UtilityCurve> curves = {threshold_curve(0.3, 0.1, 0.9),
                                        threshold_curve(0.6, 0.7, 0.2),
                                        threshold_curve(0.8, 0.4, 0.5)};
    std::vector<UtilityCurve> permuted = {curves[2], curves[0], curves[1]};
    // means agree statistically; with many draws the gap is within joint error
    Rng ra(7), rb(8);
    const auto ea = empirical_rademacher(curves, 3000, ra);
    const auto eb = empirical_rademacher(permuted, 3000, rb);
    CHECK(std::abs(ea.mean - eb.mean) <= 4.0 * (ea.std_error + eb.std_error));
}

TEST_CASE("estimate bounded by the range") {
    Rng rng(2);
    std::vector<UtilityCurve> curves;
    for (int i = 0; i < 12; ++i) curves.push_back(threshold_curve(0.05 + 0.07 * i, 0.2, 0.9));
    const auto est = empirical_rademacher(curves, 200, rng);
    CHECK(est.mean >= 0.0);
    CHECK(est.mean <= 1.0);
}

TEST_CASE("rademacher_bound branches") {
    // L=0, k=0, R/w=e, d=1: the dispersion branch reduces to sqrt(1/N)
    CHECK(rademacher_bound(1, std::exp(1.0), 1.0, 0.0, 0.0, 100) == doctest::Approx(0.1));
    // w -> R: the log term vanishes, leaving Lw + k/N
    CHECK(rademacher_bound(1, 1.0, 1.0 - 1e-13, 2.0, 5.0, 100) ==
          doctest::Approx(2.0 + 0.05).epsilon(1e-6));
    // the pdim branch can win the min
    CHECK(rademacher_bound(1, std::exp(1.0), 1.0, 0.0, 0.0, 100, 0.25) ==
          doctest::Approx(0.05));
    CHECK_THROWS_AS(rademacher_bound(1, 0.5, 0.5, 0.0, 0.0, 100), Error);
}

TEST_CASE("estimate stays below the dispersion bound on smoothed families") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        Rng rng(seed);
        adversary::FamilyParams params;
        params.n = 6;
        params.kappa = 2.0;
        params.B = 5.0;
        params.W = 4.0;
        auto stream = adversary::adversary_smoothed("knapsack", 80, rng, params);
        for (auto& c : stream.curves) {
            c.fn = piecewise::scale(c.fn, 1.0 / stream.h_bound);
            c.h_bound = 1.0;
        }
        Rng sig = rng.fork(9);
        const auto est = empirical_rademacher(stream.curves, 40, sig);
        const double R = stream.domain_hi - stream.domain_lo;
        const auto profile = dispersion::empirical_profile(
            stream.curves, {0.02 * R, 0.05 * R, 0.1 * R, 0.2 * R});
        double bound = 1e100;
        for (std::size_t i = 0; i < profile.ws.size(); ++i) {
            bound = std::min(bound, rademacher_bound(1, R, profile.ws[i], 0.0, profile.ks[i],
                                                     static_cast<int>(stream.curves.size())));
        }
        CHECK(est.mean <= bound);
    }
}

TEST_CASE("estimate shrinks as N grows") {
    // medians over 8 repetitions at N in {40, 160, 640}; allow one inversion
    std::vector<double> medians;
    for (int N : {40, 160, 640}) {
        std::vector<double> reps;
        for (std::uint64_t rep = 1; rep <= 8; ++rep) {
            Rng rng(100 * rep + N);
            std::vector<UtilityCurve> curves;
            for (int i = 0; i < N; ++i) {
                curves.push_back(threshold_curve(rng.uniform(0.05, 0.95), rng.uniform(0.0, 0.5),
                                                 rng.uniform(0.5, 1.0)));
            }
            Rng sig(999 + rep);
            reps.push_back(empirical_rademacher(curves, 30, sig).mean);
        }
        std::sort(reps.begin(), reps.end());
        medians.push_back(reps[reps.size() / 2]);
    }
    int inversions = 0;
    for (std::size_t i = 1; i < medians.size(); ++i) {
        if (medians[i] > medians[i - 1]) ++inversions;
    }
    CHECK(inversions <= 1);
}
