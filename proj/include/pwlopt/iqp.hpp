#ifndef PWLOPT_IQP_HPP
#define PWLOPT_IQP_HPP

#include <vector>

#include "pwlopt/piecewise.hpp"
#include "pwlopt/rng.hpp"

namespace pwlopt::iqp {

using piecewise::UtilityCurve;

// Symmetric matrix with nonnegative diagonal for the objective z^T A z over
// z in {-1,+1}^n. Row-major dense storage.
struct IqpInstance {
    int n = 0;
    std::vector<double> a;  // n*n, symmetric

    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double abs_sum() const;
};

IqpInstance make_iqp(int n, std::vector<double> entries);

// Unit vectors u_1..u_n and the relaxation objective sum a_ij <u_i, u_j>.
struct Embedding {
    int n = 0;
    int rank = 0;
    std::vector<double> u;  // n x rank, row-major, unit rows
    double sdp_objective = 0.0;

    const double* row(int i) const { return u.data() + static_cast<std::size_t>(i) * rank; }
};

// Low-rank projected gradient ascent on the unit-sphere factorization (in
// place of an exact SDP solver; desk scale, no external dependency). Rows are
// renormalized every step and steps are accepted only when the objective does
// not decrease.
Embedding sdp_embed(const IqpInstance& inst, int rank, int iters, double tol, Rng& rng);

// Outward-rotation rounding value at angle gamma in [0, pi/2]:
// v'_i = cos(gamma) <u_i, Z[0..n)> + sin(gamma) Z[n+i], value = sgn^T A sgn.
// sign(0) := +1. gamma = 0 is plain sign rounding of the embedding.
double uowr_value(const IqpInstance& inst, const Embedding& emb, const std::vector<double>& z2n,
                  double gamma);

// Exact piecewise-constant utility curve of outward rotation over [0, pi/2];
// breakpoints are arctan(-<u_i, Z[0..n)> / Z[n+i]) clipped to the domain.
UtilityCurve owr_curve(const IqpInstance& inst, const Embedding& emb,
                       const std::vector<double>& z2n);

enum class SlinMode { expected, sampled };

// s-linear rounding utility with phi_s(y) = clamp(y/s, -1, 1). The expected
// mode returns sum_i a_ii + sum_{i!=j} a_ij phi_s(v_i) phi_s(v_j); the
// diagonal term is the exact expectation of a_ii z_i^2 (printed differently
// in places as a squared term; the expectation is what the sampled mode
// converges to). The sampled mode draws z_i = +-1 with probability
// (1 +- phi_s(v_i))/2 and returns z^T A z.
double uslin_value(const IqpInstance& inst, const Embedding& emb, const std::vector<double>& zn,
                   double s, SlinMode mode, Rng* rng = nullptr);

// Discontinuities of the expected s-linear utility: { |<u_i, Z>| } in
// (0, s_max]. Between consecutive values the utility is a/s^2 + b/s + c.
std::vector<double> slin_breakpoints(const Embedding& emb, const std::vector<double>& zn,
                                     double s_max);

// High-probability upper end of the s search interval:
// sqrt(2 ln(sqrt(8/pi) * 2 n T / zeta)).
double slin_search_bound(int n, int T, double zeta);

// Lipschitz certificate of the summed expected s-linear utility above the
// smallest breakpoint: 256 M n^5 T^3 / zeta^3 * ln(sqrt(8/pi) 2 n T / zeta),
// with M the largest |a_ij|. A report number only; nothing gates on it.
double slin_lipschitz_certificate(double M, int n, int T, double zeta);

// Exact optimum of z^T A z by Gray-code enumeration, n <= 18.
double brute_force_iqp(const IqpInstance& inst);

// Max-cut instance in IQP form: a_ij = -w_ij/4 off-diagonal and
// a_ii = (sum_j w_ij)/4, so z^T A z equals the weight of the cut induced by z
// and the diagonal is nonnegative. Edge weights uniform on (0,1], ER(p) graph.
IqpInstance gen_maxcut(int n, double edge_p, Rng& rng);

// Embeddings are expensive relative to everything downstream, so they can be
// cached to JSON keyed by instance content + rank + seed.
std::string embedding_cache_key(const IqpInstance& inst, int rank, std::uint64_t seed);
std::string embedding_to_json(const Embedding& emb);
Embedding embedding_from_json(const std::string& text);

}  // namespace pwlopt::iqp

#endif
