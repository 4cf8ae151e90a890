#include "pwlopt/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace pwlopt::piecewise {

namespace {

double piece_extreme(const Piece& p, bool want_max) {
    if (p.kind == PieceKind::constant || p.slope == 0.0) return p.intercept;
    const double a = p.value_at(p.lo), b = p.value_at(p.hi);
    return want_max ? std::max(a, b) : std::min(a, b);
}

}  // namespace

double Piece::min_value() const { return piece_extreme(*this, false); }
double Piece::max_value() const { return piece_extreme(*this, true); }

std::size_t PiecewiseFn1D::piece_index(double x) const {
    // number of breakpoints <= x; right-continuity at breakpoints
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    return static_cast<std::size_t>(it - breakpoints.begin());
}

double PiecewiseFn1D::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces) m = std::min(m, p.min_value());
    return m;
}

double PiecewiseFn1D::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& p : pieces) m = std::max(m, p.max_value());
    return m;
}

PiecewiseFn1D make_piecewise(double lo, double hi, std::vector<double> breakpoints,
                             std::vector<Piece> pieces) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "EmptyDomain",
            "domain must satisfy lo < hi");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        const double b = breakpoints[i];
        require(b > lo && b < hi, "UnsortedBreakpoints",
                "breakpoint outside the open domain");
        if (i > 0) {
            require(breakpoints[i - 1] < b, "UnsortedBreakpoints",
                    "breakpoints must be strictly increasing");
        }
    }
    require(pieces.size() == breakpoints.size() + 1, "PieceCountMismatch",
            "need |breakpoints|+1 pieces");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const double want_lo = (i == 0) ? lo : breakpoints[i - 1];
        const double want_hi = (i + 1 == pieces.size()) ? hi : breakpoints[i];
        require(pieces[i].lo == want_lo && pieces[i].hi == want_hi, "PieceCountMismatch",
                "pieces must tile the domain with no gaps or overlaps");
    }
    PiecewiseFn1D f;
    f.lo = lo;
    f.hi = hi;
    f.breakpoints = std::move(breakpoints);
    f.pieces = std::move(pieces);
    return f;
}

PiecewiseFn1D constant_fn(double lo, double hi, double value) {
    return make_piecewise(lo, hi, {}, {Piece::constant(lo, hi, value)});
}

PiecewiseFn1D sum(std::span<const PiecewiseFn1D> fns, double lo, double hi) {
    if (fns.empty()) return constant_fn(lo, hi, 0.0);
    for (const auto& f : fns) {
        require(f.lo == lo && f.hi == hi, "DomainMismatch",
                "summands must share the same domain");
    }
    // delta sweep: each summand contributes its first piece at lo and a
    // (slope, intercept) change at every breakpoint, so a single sorted pass
    // over all changes builds the sum in O(E log E) for E total breakpoints
    struct Event {
        double x, dslope, dintercept;
        int daffine;
    };
    std::vector<Event> events;
    double slope = 0.0, intercept = 0.0;
    int affine_count = 0;
    for (const auto& f : fns) {
        const Piece& first = f.pieces.front();
        slope += first.slope;
        intercept += first.intercept;
        affine_count += first.kind == PieceKind::affine ? 1 : 0;
        for (std::size_t i = 0; i < f.breakpoints.size(); ++i) {
            const Piece& prev = f.pieces[i];
            const Piece& next = f.pieces[i + 1];
            events.push_back({f.breakpoints[i], next.slope - prev.slope,
                              next.intercept - prev.intercept,
                              (next.kind == PieceKind::affine ? 1 : 0) -
                                  (prev.kind == PieceKind::affine ? 1 : 0)});
        }
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.x < b.x; });

    std::vector<double> merged;
    std::vector<Piece> pieces;
    double seg_lo = lo;
    std::size_t e = 0;
    while (true) {
        const double seg_hi = (e == events.size()) ? hi : events[e].x;
        if (seg_hi > seg_lo) {
            pieces.push_back(affine_count > 0 ? Piece::affine(seg_lo, seg_hi, slope, intercept)
                                              : Piece::constant(seg_lo, seg_hi, intercept));
            if (e < events.size()) merged.push_back(seg_hi);
            seg_lo = seg_hi;
        }
        if (e == events.size()) break;
        // fold every change at this coordinate before opening the next piece
        const double x = events[e].x;
        while (e < events.size() && events[e].x == x) {
            slope += events[e].dslope;
            intercept += events[e].dintercept;
            affine_count += events[e].daffine;
            ++e;
        }
    }
    return make_piecewise(lo, hi, std::move(merged), std::move(pieces));
}

PiecewiseFn1D sum(const std::vector<PiecewiseFn1D>& fns, double lo, double hi) {
    return sum(std::span<const PiecewiseFn1D>(fns.data(), fns.size()), lo, hi);
}

// Exact two-way merge (no running deltas): used by the online learner where
// the cumulative function is folded thousands of times.
PiecewiseFn1D sum2(const PiecewiseFn1D& f, const PiecewiseFn1D& g) {
    require(f.lo == g.lo && f.hi == g.hi, "DomainMismatch",
            "summands must share the same domain");
    std::vector<double> merged;
    merged.reserve(f.breakpoints.size() + g.breakpoints.size());
    std::merge(f.breakpoints.begin(), f.breakpoints.end(), g.breakpoints.begin(),
               g.breakpoints.end(), std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    std::vector<Piece> pieces;
    pieces.reserve(merged.size() + 1);
    std::size_t cf = 0, cg = 0;
    double seg_lo = f.lo;
    for (std::size_t seg = 0; seg <= merged.size(); ++seg) {
        const double seg_hi = (seg == merged.size()) ? f.hi : merged[seg];
        while (cf < f.breakpoints.size() && f.breakpoints[cf] <= seg_lo) ++cf;
        while (cg < g.breakpoints.size() && g.breakpoints[cg] <= seg_lo) ++cg;
        const Piece& pf = f.pieces[cf];
        const Piece& pg = g.pieces[cg];
        const bool affine = pf.kind == PieceKind::affine || pg.kind == PieceKind::affine;
        pieces.push_back(affine
                             ? Piece::affine(seg_lo, seg_hi, pf.slope + pg.slope,
                                             pf.intercept + pg.intercept)
                             : Piece::constant(seg_lo, seg_hi, pf.intercept + pg.intercept));
        seg_lo = seg_hi;
    }
    return make_piecewise(f.lo, f.hi, std::move(merged), std::move(pieces));
}

PiecewiseFn1D scale(const PiecewiseFn1D& f, double factor) {
    PiecewiseFn1D out = f;
    for (auto& p : out.pieces) {
        p.slope *= factor;
        p.intercept *= factor;
    }
    return out;
}

double eval(const PiecewiseFn1D& f, double rho) {
    require(rho >= f.lo && rho <= f.hi, "OutOfDomain", "evaluation point outside domain");
    return f.pieces[f.piece_index(rho)].value_at(rho);
}

ArgmaxResult argmax(const PiecewiseFn1D& f) {
    ArgmaxResult best{0.0, -std::numeric_limits<double>::infinity()};
    for (const auto& p : f.pieces) {
        double rho, value;
        if (p.kind == PieceKind::constant || p.slope == 0.0) {
            rho = 0.5 * (p.lo + p.hi);
            value = p.intercept;
        } else if (p.slope > 0.0) {
            rho = p.hi;
            value = p.value_at(p.hi);
        } else {
            rho = p.lo;
            value = p.value_at(p.lo);
        }
        if (value > best.value || (value == best.value && rho < best.rho)) {
            best = {rho, value};
        }
    }
    return best;
}

namespace {

struct PieceMass {
    double log_mass;  // log of integral of exp(lambda*f - shift) over the clipped piece
    double clip_lo, clip_hi;
    const Piece* piece;
};

// Per-piece masses of exp(lambda*f) over [a, b], shifted by the max exponent.
// Returns the shift; fills `out`. log-mass uses the closed forms:
// constant c: len * e^{lambda c}; affine: (e^{lambda(s*hi+b)} - e^{lambda(s*lo+b)})/(lambda s).
double shifted_masses(const PiecewiseFn1D& f, double lambda, double a, double b,
                      std::vector<PieceMass>& out) {
    require(a >= f.lo && b <= f.hi && a <= b, "IntervalOutOfDomain",
            "integration interval must lie inside the domain");
    out.clear();
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& p : f.pieces) {
        const double lo = std::max(a, p.lo), hi = std::min(b, p.hi);
        if (lo >= hi) continue;
        shift = std::max(shift, std::max(lambda * p.value_at(lo), lambda * p.value_at(hi)));
    }
    if (!std::isfinite(shift)) shift = 0.0;  // empty interval
    for (const auto& p : f.pieces) {
        const double lo = std::max(a, p.lo), hi = std::min(b, p.hi);
        if (lo >= hi) continue;
        const double g = lambda * p.slope;  // exponent slope
        double log_mass;
        if (p.kind == PieceKind::constant || g == 0.0 || std::abs(g) * (hi - lo) < 1e-14) {
            // constant limit of the affine form
            const double mid = lambda * p.value_at(0.5 * (lo + hi)) - shift;
            log_mass = std::log(hi - lo) + mid;
        } else {
            // integral = e^{top}/g * (1 - e^{-|g| len}) with top the larger endpoint exponent
            const double e_lo = lambda * p.value_at(lo) - shift;
            const double e_hi = lambda * p.value_at(hi) - shift;
            const double top = std::max(e_lo, e_hi);
            const double len = hi - lo;
            log_mass = top + std::log(-std::expm1(-std::abs(g) * len)) - std::log(std::abs(g));
        }
        out.push_back({log_mass, lo, hi, &p});
    }
    return shift;
}

double log_sum(const std::vector<PieceMass>& masses) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& m : masses) top = std::max(top, m.log_mass);
    if (!std::isfinite(top)) return top;
    double s = 0.0;
    for (const auto& m : masses) s += std::exp(m.log_mass - top);
    return top + std::log(s);
}

}  // namespace

double log_exp_integral(const PiecewiseFn1D& f, double lambda, double a, double b) {
    if (a == b) return -std::numeric_limits<double>::infinity();
    std::vector<PieceMass> masses;
    const double shift = shifted_masses(f, lambda, a, b, masses);
    return shift + log_sum(masses);
}

double exp_integral(const PiecewiseFn1D& f, double lambda, double a, double b) {
    if (a == b) return 0.0;
    return std::exp(log_exp_integral(f, lambda, a, b));
}

double sample_exp(const PiecewiseFn1D& f, double lambda, Rng& rng) {
    std::vector<PieceMass> masses;
    shifted_masses(f, lambda, f.lo, f.hi, masses);

    const double log_total = log_sum(masses);
    require(std::isfinite(log_total), "NonFiniteMass", "total mass is zero or non-finite");
    for (const auto& m : masses) {
        require(!std::isnan(m.log_mass), "NonFiniteMass", "piece mass is non-finite");
    }

    // stage 1: piece index with probability Z_i / sum Z_j
    double u = rng.uniform01();
    std::size_t chosen = masses.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        acc += std::exp(masses[i].log_mass - log_total);
        if (u < acc) {
            chosen = i;
            break;
        }
    }

    // stage 2: invert the within-piece CDF
    const PieceMass& m = masses[chosen];
    const Piece& p = *m.piece;
    const double lo = m.clip_lo, hi = m.clip_hi;
    const double g = lambda * p.slope;
    const double v = rng.uniform01();
    if (p.kind == PieceKind::constant || g == 0.0 || std::abs(g) * (hi - lo) < 1e-14) {
        return lo + v * (hi - lo);
    }
    // CDF(x) = (e^{g(x-lo)} - 1) / (e^{g(hi-lo)} - 1); inverse via log1p/expm1
    const double x = lo + std::log1p(v * std::expm1(g * (hi - lo))) / g;
    return std::min(std::max(x, lo), hi);
}

std::string to_json(const PiecewiseFn1D& f) {
    nlohmann::json j;
    j["domain"] = {f.lo, f.hi};
    j["breakpoints"] = f.breakpoints;
    auto& pieces = j["pieces"] = nlohmann::json::array();
    for (const auto& p : f.pieces) {
        nlohmann::json pj;
        pj["lo"] = p.lo;
        pj["hi"] = p.hi;
        if (p.kind == PieceKind::constant) {
            pj["form"] = "constant";
            pj["value"] = p.intercept;
        } else {
            pj["form"] = "affine";
            pj["slope"] = p.slope;
            pj["intercept"] = p.intercept;
        }
        pieces.push_back(std::move(pj));
    }
    return j.dump();
}

PiecewiseFn1D from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<Piece> pieces;
    for (const auto& pj : j.at("pieces")) {
        const double lo = pj.at("lo").get<double>();
        const double hi = pj.at("hi").get<double>();
        if (pj.at("form").get<std::string>() == "constant") {
            pieces.push_back(Piece::constant(lo, hi, pj.at("value").get<double>()));
        } else {
            pieces.push_back(
                Piece::affine(lo, hi, pj.at("slope").get<double>(), pj.at("intercept").get<double>()));
        }
    }
    return make_piecewise(j.at("domain").at(0).get<double>(), j.at("domain").at(1).get<double>(),
                          j.at("breakpoints").get<std::vector<double>>(), std::move(pieces));
}

}  // namespace pwlopt::piecewise
