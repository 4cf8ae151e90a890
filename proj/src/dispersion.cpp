#include "pwlopt/dispersion.hpp"

#include <algorithm>
#include <cmath>

#include "pwlopt/error.hpp"

namespace pwlopt::dispersion {

int DispersionProfile::k_at(double w) const {
    // smallest recorded radius >= w (ks nondecreasing makes this conservative)
    for (std::size_t i = 0; i < ws.size(); ++i) {
        if (ws[i] >= w) return ks[i];
    }
    require(!ws.empty(), "EmptyProfile", "profile has no radii");
    return ks.back();
}

std::vector<std::pair<double, int>> collect_breakpoints(const std::vector<UtilityCurve>& curves) {
    std::vector<std::pair<double, int>> out;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        for (double b : curves[i].fn.breakpoints) out.emplace_back(b, static_cast<int>(i));
    }
    std::sort(out.begin(), out.end());
    return out;
}

int max_interval_count(std::vector<double> points, double w) {
    require(w > 0.0, "BadRadius", "w must be positive");
    if (points.empty()) return 0;
    std::sort(points.begin(), points.end());
    int best = 0;
    std::size_t hi = 0;
    for (std::size_t lo = 0; lo < points.size(); ++lo) {
        if (hi < lo) hi = lo;
        while (hi + 1 < points.size() && points[hi + 1] <= points[lo] + w) ++hi;
        best = std::max(best, static_cast<int>(hi - lo + 1));
    }
    return best;
}

int dispersion_at(const std::vector<UtilityCurve>& curves, double rho0, double w) {
    require(w > 0.0, "BadRadius", "w must be positive");
    const double lo = rho0 - w, hi = rho0 + w;
    int count = 0;
    for (const auto& c : curves) {
        for (double b : c.fn.breakpoints) {
            if (b >= lo && b <= hi) {
                ++count;
                break;
            }
        }
    }
    return count;
}

namespace {

// Max over ball centers of the number of distinct split curves, via a sweep
// over the union (per curve) of the intervals [b-w, b+w].
int max_split_count(const std::vector<UtilityCurve>& curves, double w) {
    std::vector<std::pair<double, int>> events;  // (+1 at start, -1 past end)
    for (const auto& c : curves) {
        const auto& bps = c.fn.breakpoints;
        if (bps.empty()) continue;
        double start = bps[0] - w, end = bps[0] + w;
        for (std::size_t i = 1; i < bps.size(); ++i) {
            const double s = bps[i] - w;
            if (s <= end) {
                end = bps[i] + w;
            } else {
                events.emplace_back(start, +1);
                events.emplace_back(end, -1);
                start = s;
                end = bps[i] + w;
            }
        }
        events.emplace_back(start, +1);
        events.emplace_back(end, -1);
    }
    // closed balls: at a shared coordinate, starts are applied before ends
    std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
        return a.first < b.first || (a.first == b.first && a.second > b.second);
    });
    int depth = 0, best = 0;
    for (const auto& [x, d] : events) {
        depth += d;
        best = std::max(best, depth);
    }
    return best;
}

}  // namespace

DispersionProfile empirical_profile(const std::vector<UtilityCurve>& curves,
                                    std::vector<double> ws) {
    for (std::size_t i = 0; i < ws.size(); ++i) {
        require(ws[i] > 0.0, "BadRadius", "radii must be positive");
        if (i > 0) require(ws[i - 1] <= ws[i], "BadRadius", "radii must be sorted");
    }
    DispersionProfile profile;
    profile.ws = std::move(ws);
    profile.ks.reserve(profile.ws.size());
    int floor_k = 0;
    for (double w : profile.ws) {
        const int k = std::max(floor_k, max_split_count(curves, w));
        profile.ks.push_back(k);
        floor_k = k;
    }
    return profile;
}

KappaReport kappa_check(const std::vector<double>& samples, double kappa, double w, double zeta,
                        double concentration_constant) {
    require(kappa > 0.0 && w > 0.0 && zeta > 0.0 && zeta < 1.0, "BadParams",
            "need kappa > 0, w > 0, zeta in (0,1)");
    KappaReport report;
    const double r = static_cast<double>(samples.size());
    report.observed_k = samples.empty() ? 0 : max_interval_count(samples, w);
    report.bound_k = r * w * kappa + concentration_constant * std::sqrt(r * std::log(1.0 / zeta));
    report.pass = static_cast<double>(report.observed_k) <= report.bound_k;
    return report;
}

}  // namespace pwlopt::dispersion
