#include "pwlopt/iqp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "pwlopt/error.hpp"

namespace pwlopt::iqp {

double IqpInstance::abs_sum() const {
    double s = 0.0;
    for (double x : a) s += std::abs(x);
    return s;
}

IqpInstance make_iqp(int n, std::vector<double> entries) {
    require(n >= 1 && entries.size() == static_cast<std::size_t>(n) * n, "BadParams",
            "need an n x n matrix");
    IqpInstance inst{n, std::move(entries)};
    for (int i = 0; i < n; ++i) {
        require(inst.at(i, i) >= 0.0, "BadParams", "diagonal entries must be nonnegative");
        for (int j = i + 1; j < n; ++j) {
            require(std::abs(inst.at(i, j) - inst.at(j, i)) <= 1e-12, "NonSymmetric",
                    "matrix must be symmetric to 1e-12");
        }
    }
    return inst;
}

namespace {

double objective(const IqpInstance& inst, const std::vector<double>& u, int rank) {
    const int n = inst.n;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double aij = inst.at(i, j);
            if (aij == 0.0) continue;
            double dot = 0.0;
            for (int r = 0; r < rank; ++r) dot += u[i * rank + r] * u[j * rank + r];
            total += aij * dot;
        }
    }
    return total;
}

void normalize_rows(std::vector<double>& u, int n, int rank, Rng& rng) {
    for (int i = 0; i < n; ++i) {
        double norm2 = 0.0;
        for (int r = 0; r < rank; ++r) norm2 += u[i * rank + r] * u[i * rank + r];
        if (norm2 < 1e-300) {
            for (int r = 0; r < rank; ++r) u[i * rank + r] = rng.normal();
            norm2 = 0.0;
            for (int r = 0; r < rank; ++r) norm2 += u[i * rank + r] * u[i * rank + r];
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (int r = 0; r < rank; ++r) u[i * rank + r] *= inv;
    }
}

}  // namespace

Embedding sdp_embed(const IqpInstance& inst, int rank, int iters, double tol, Rng& rng) {
    require(rank >= 2, "BadParams", "rank must be at least 2");
    const int n = inst.n;
    std::vector<double> u(static_cast<std::size_t>(n) * rank);
    for (double& x : u) x = rng.normal();
    normalize_rows(u, n, rank, rng);

    double obj = objective(inst, u, rank);
    double step = 0.5 / std::max(1.0, inst.abs_sum() / n);
    std::vector<double> grad(u.size()), trial(u.size());
    for (int it = 0; it < iters; ++it) {
        // gradient of sum a_ij <u_i,u_j> wrt u_i is 2 sum_j a_ij u_j
        std::fill(grad.begin(), grad.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double aij = inst.at(i, j);
                if (aij == 0.0) continue;
                for (int r = 0; r < rank; ++r) grad[i * rank + r] += 2.0 * aij * u[j * rank + r];
            }
        }
        bool accepted = false;
        for (int half = 0; half < 30 && !accepted; ++half) {
            trial = u;
            for (std::size_t x = 0; x < u.size(); ++x) trial[x] += step * grad[x];
            normalize_rows(trial, n, rank, rng);
            const double trial_obj = objective(inst, trial, rank);
            if (trial_obj >= obj) {
                const double rel = (trial_obj - obj) / std::max(1.0, std::abs(obj));
                u.swap(trial);
                obj = trial_obj;
                accepted = true;
                if (rel < tol) it = iters;  // converged
            } else {
                step *= 0.5;
            }
        }
        if (!accepted) break;
    }

    Embedding emb;
    emb.n = n;
    emb.rank = rank;
    emb.u = std::move(u);
    emb.sdp_objective = obj;
    return emb;
}

namespace {

double signed_quadratic(const IqpInstance& inst, const std::vector<int>& sgn) {
    const int n = inst.n;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) total += inst.at(i, j) * sgn[i] * sgn[j];
    }
    return total;
}

// projections c_i = <u_i, Z[0..n)> and d_i = Z[n+i]
void owr_projections(const Embedding& emb, const std::vector<double>& z2n, std::vector<double>& c,
                     std::vector<double>& d) {
    const int n = emb.n;
    require(z2n.size() == static_cast<std::size_t>(2 * n), "BadParams",
            "Z must have 2n coordinates");
    c.assign(n, 0.0);
    d.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* ui = emb.row(i);
        double dot = 0.0;
        // Z[0..n) acts on the embedding through the vectors' span only; using
        // the first rank coordinates of Z is the same Gaussian projection
        for (int r = 0; r < emb.rank && r < n; ++r) dot += ui[r] * z2n[r];
        c[i] = dot;
        d[i] = z2n[n + i];
    }
}

}  // namespace

double uowr_value(const IqpInstance& inst, const Embedding& emb, const std::vector<double>& z2n,
                  double gamma) {
    require(gamma >= 0.0 && gamma <= 1.5707963267948967, "BadParams",
            "gamma must lie in [0, pi/2]");
    std::vector<double> c, d;
    owr_projections(emb, z2n, c, d);
    std::vector<int> sgn(inst.n);
    const double cg = std::cos(gamma), sg = std::sin(gamma);
    for (int i = 0; i < inst.n; ++i) {
        const double v = cg * c[i] + sg * d[i];
        sgn[i] = v < 0.0 ? -1 : 1;  // sign(0) := +1
    }
    return signed_quadratic(inst, sgn);
}

UtilityCurve owr_curve(const IqpInstance& inst, const Embedding& emb,
                       const std::vector<double>& z2n) {
    constexpr double kHalfPi = 1.5707963267948966;
    std::vector<double> c, d;
    owr_projections(emb, z2n, c, d);
    for (int i = 0; i < inst.n; ++i) {
        require(d[i] != 0.0, "DegenerateZ", "Z[n+i] must be nonzero (perturb and retry)");
    }
    std::vector<double> bps;
    for (int i = 0; i < inst.n; ++i) {
        const double g = std::atan(-c[i] / d[i]);
        if (g > 0.0 && g < kHalfPi) bps.push_back(g);
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

    std::vector<piecewise::Piece> pieces;
    double lo = 0.0;
    for (std::size_t i = 0; i <= bps.size(); ++i) {
        const double hi = (i == bps.size()) ? kHalfPi : bps[i];
        pieces.push_back(
            piecewise::Piece::constant(lo, hi, uowr_value(inst, emb, z2n, 0.5 * (lo + hi))));
        lo = hi;
    }
    UtilityCurve curve;
    curve.fn = piecewise::make_piecewise(0.0, kHalfPi, std::move(bps), std::move(pieces));
    curve.h_bound = inst.abs_sum();
    curve.instance_tag = "owr";
    return curve;
}

double uslin_value(const IqpInstance& inst, const Embedding& emb, const std::vector<double>& zn,
                   double s, SlinMode mode, Rng* rng) {
    require(s > 0.0, "NonPositiveS", "s must be positive");
    const int n = inst.n;
    require(zn.size() >= static_cast<std::size_t>(std::min(emb.rank, n)), "BadParams",
            "Z must cover the embedding rank");
    std::vector<double> phi(n);
    for (int i = 0; i < n; ++i) {
        const double* ui = emb.row(i);
        double v = 0.0;
        for (int r = 0; r < emb.rank && r < static_cast<int>(zn.size()); ++r) v += ui[r] * zn[r];
        phi[i] = std::clamp(v / s, -1.0, 1.0);
    }
    if (mode == SlinMode::expected) {
        // diagonal slots add a_ii (the exact expectation of a_ii z_i^2); the
        // loop nesting mirrors the sign-rounding sum so that the GW corner
        // (phi = +-1 everywhere) reproduces it bit for bit
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                total += (i == j) ? inst.at(i, i) : inst.at(i, j) * phi[i] * phi[j];
            }
        }
        return total;
    }
    require(rng != nullptr, "BadParams", "sampled mode needs an rng");
    std::vector<int> sgn(n);
    for (int i = 0; i < n; ++i) sgn[i] = rng->bernoulli(0.5 * (1.0 + phi[i])) ? 1 : -1;
    return signed_quadratic(inst, sgn);
}

std::vector<double> slin_breakpoints(const Embedding& emb, const std::vector<double>& zn,
                                     double s_max) {
    require(s_max > 0.0, "BadParams", "s_max must be positive");
    std::vector<double> bps;
    for (int i = 0; i < emb.n; ++i) {
        const double* ui = emb.row(i);
        double v = 0.0;
        for (int r = 0; r < emb.rank && r < static_cast<int>(zn.size()); ++r) v += ui[r] * zn[r];
        const double b = std::abs(v);
        if (b > 0.0 && b <= s_max) bps.push_back(b);
    }
    std::sort(bps.begin(), bps.end());
    return bps;
}

double slin_search_bound(int n, int T, double zeta) {
    require(n >= 1 && T >= 1 && zeta > 0.0 && zeta < 1.0, "BadParams",
            "need n, T >= 1 and zeta in (0,1)");
    return std::sqrt(2.0 * std::log(std::sqrt(8.0 / 3.141592653589793) * 2.0 * n * T / zeta));
}

double slin_lipschitz_certificate(double M, int n, int T, double zeta) {
    require(M >= 0.0 && n >= 1 && T >= 1 && zeta > 0.0 && zeta < 1.0, "BadParams",
            "need M >= 0, n, T >= 1, zeta in (0,1)");
    const double nn = n, tt = T;
    return 256.0 * M * std::pow(nn, 5) * std::pow(tt, 3) / std::pow(zeta, 3) *
           std::log(std::sqrt(8.0 / 3.141592653589793) * 2.0 * nn * tt / zeta);
}

double brute_force_iqp(const IqpInstance& inst) {
    const int n = inst.n;
    require(n <= 18, "TooLarge", "enumeration capped at n = 18");
    std::vector<int> sgn(n, 1);
    // g[k] = sum_j a_kj z_j, maintained across Gray-code single flips
    std::vector<double> g(n, 0.0);
    double value = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            g[i] += inst.at(i, j);
            value += inst.at(i, j);
        }
    }
    double best = value;
    const std::uint64_t total = 1ull << n;
    for (std::uint64_t it = 1; it < total; ++it) {
        const int k = __builtin_ctzll(it);  // Gray code flips bit k
        // flipping z_k: delta = -4 z_k (g_k - a_kk z_k) ... derived from
        // z^T A z = sum_{i,j} a_ij z_i z_j with symmetric A
        value -= 4.0 * sgn[k] * (g[k] - inst.at(k, k) * sgn[k]);
        sgn[k] = -sgn[k];
        for (int j = 0; j < n; ++j) g[j] += 2.0 * sgn[k] * inst.at(j, k);
        best = std::max(best, value);
    }
    return best;
}

std::string embedding_cache_key(const IqpInstance& inst, int rank, std::uint64_t seed) {
    // FNV-1a over the raw matrix bytes plus the solver inputs
    std::uint64_t h = 1469598103934665603ull;
    const auto mix = [&h](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    mix(inst.a.data(), inst.a.size() * sizeof(double));
    mix(&inst.n, sizeof(inst.n));
    mix(&rank, sizeof(rank));
    mix(&seed, sizeof(seed));
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string embedding_to_json(const Embedding& emb) {
    nlohmann::json j;
    j["n"] = emb.n;
    j["rank"] = emb.rank;
    j["u"] = emb.u;
    j["sdp_objective"] = emb.sdp_objective;
    return j.dump();
}

Embedding embedding_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Embedding emb;
    emb.n = j.at("n").get<int>();
    emb.rank = j.at("rank").get<int>();
    emb.u = j.at("u").get<std::vector<double>>();
    emb.sdp_objective = j.at("sdp_objective").get<double>();
    require(emb.u.size() == static_cast<std::size_t>(emb.n) * emb.rank, "BadParams",
            "embedding payload has the wrong shape");
    return emb;
}

IqpInstance gen_maxcut(int n, double edge_p, Rng& rng) {
    require(n >= 2 && edge_p >= 0.0 && edge_p <= 1.0, "BadParams",
            "need n >= 2 and edge_p in [0,1]");
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    IqpInstance inst{n, std::move(a)};
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.bernoulli(edge_p)) {
                const double w = std::max(rng.uniform01(), 1e-12);
                inst.at(i, j) = -0.25 * w;
                inst.at(j, i) = -0.25 * w;
                inst.at(i, i) += 0.25 * w;
                inst.at(j, j) += 0.25 * w;
            }
        }
    }
    return inst;
}

}  // namespace pwlopt::iqp
