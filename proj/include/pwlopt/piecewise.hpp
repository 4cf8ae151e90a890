#ifndef PWLOPT_PIECEWISE_HPP
#define PWLOPT_PIECEWISE_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pwlopt/error.hpp"
#include "pwlopt/rng.hpp"

namespace pwlopt::piecewise {

enum class PieceKind { constant, affine };

// One half-open cell [lo, hi) of a piecewise function (the last cell of a
// function is closed at the domain's right end). Constant pieces store the
// value in `intercept` with slope 0; affine pieces evaluate slope*x+intercept.
struct Piece {
    double lo = 0.0;
    double hi = 0.0;
    PieceKind kind = PieceKind::constant;
    double slope = 0.0;
    double intercept = 0.0;

    static Piece constant(double lo, double hi, double value) {
        return Piece{lo, hi, PieceKind::constant, 0.0, value};
    }
    static Piece affine(double lo, double hi, double slope, double intercept) {
        return Piece{lo, hi, PieceKind::affine, slope, intercept};
    }

    double value_at(double x) const { return slope * x + intercept; }
    double min_value() const;
    double max_value() const;

    bool operator==(const Piece& other) const = default;
};

// Real function on [lo, hi] given by closed-form pieces between sorted
// breakpoints. Evaluation is right-continuous at breakpoints: the value at a
// breakpoint belongs to the piece starting there. Immutable after
// construction; operations return new values.
struct PiecewiseFn1D {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> breakpoints;  // strictly increasing, strictly inside (lo, hi)
    std::vector<Piece> pieces;        // breakpoints.size() + 1, tiling [lo, hi]

    std::size_t piece_index(double x) const;
    double min_value() const;
    double max_value() const;

    bool operator==(const PiecewiseFn1D& other) const = default;
};

// A utility function u(x, .) tagged with the instance that produced it and a
// range bound H (values lie in [0, h_bound]).
struct UtilityCurve {
    PiecewiseFn1D fn;
    double h_bound = 1.0;
    std::string instance_tag;
};

struct ArgmaxResult {
    double rho = 0.0;
    double value = 0.0;
};

// Validated construction. Breakpoints must be sorted, strictly increasing and
// strictly inside the domain; pieces must tile [lo, hi] exactly.
PiecewiseFn1D make_piecewise(double lo, double hi, std::vector<double> breakpoints,
                             std::vector<Piece> pieces);

PiecewiseFn1D constant_fn(double lo, double hi, double value);

// Pointwise sum. Breakpoints are merged with exact-equality deduplication
// (breakpoints come from deterministic formulas; epsilon-merging would
// silently change the piece structure). The empty sum is the constant 0.
PiecewiseFn1D sum(std::span<const PiecewiseFn1D> fns, double lo, double hi);
PiecewiseFn1D sum(const std::vector<PiecewiseFn1D>& fns, double lo, double hi);
PiecewiseFn1D sum2(const PiecewiseFn1D& f, const PiecewiseFn1D& g);
PiecewiseFn1D scale(const PiecewiseFn1D& f, double factor);

double eval(const PiecewiseFn1D& f, double rho);

// Supremum over the closure of every piece. rho* is the leftmost attaining
// point: piece midpoint for constant pieces, the closed-form endpoint for
// affine pieces; ties break toward lower rho.
ArgmaxResult argmax(const PiecewiseFn1D& f);

// Integral of exp(lambda * f) over [a, b], exact per piece. Internally shifts
// by max(lambda * f) before exponentiating so lambda * f of order hundreds
// does not overflow; the true value is restored at the end (and may be inf
// when it genuinely exceeds double range).
double exp_integral(const PiecewiseFn1D& f, double lambda, double a, double b);

// log of the same integral, always finite while the mass is positive.
double log_exp_integral(const PiecewiseFn1D& f, double lambda, double a, double b);

// Exact sample from the density proportional to exp(lambda * f) over the
// domain: stage 1 picks a piece with probability Z_i / sum Z_j, stage 2
// inverts the within-piece CDF in closed form (uniform for constant pieces,
// logarithmic inverse for affine). Shifts by max(lambda * f) internally, so
// callers do not need to rescale lambda to avoid overflow.
double sample_exp(const PiecewiseFn1D& f, double lambda, Rng& rng);

std::string to_json(const PiecewiseFn1D& f);
PiecewiseFn1D from_json(const std::string& text);

}  // namespace pwlopt::piecewise

#endif
