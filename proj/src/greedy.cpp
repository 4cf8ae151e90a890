#include "pwlopt/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pwlopt/error.hpp"

namespace pwlopt::greedy {

void MwisInstance::add_edge(std::size_t u, std::size_t v) {
    require(u < n() && v < n() && u != v, "BadEdge", "edge endpoints must be distinct vertices");
    nbr[u] |= (1ull << v);
    nbr[v] |= (1ull << u);
}

int MwisInstance::degree(std::size_t v) const { return __builtin_popcountll(nbr[v]); }

int MwisInstance::max_degree() const {
    int d = 0;
    for (std::size_t v = 0; v < n(); ++v) d = std::max(d, degree(v));
    return d;
}

MwisInstance make_mwis(std::vector<double> weights,
                       const std::vector<std::pair<int, int>>& edges) {
    require(weights.size() <= 64, "TooLarge", "bitmask adjacency supports n <= 64");
    MwisInstance inst;
    inst.weights = std::move(weights);
    inst.nbr.assign(inst.n(), 0);
    for (const auto& [u, v] : edges) inst.add_edge(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    return inst;
}

namespace {

// Pack in the given order, skipping items that do not fit.
GreedyResult pack_in_order(const KnapsackInstance& inst, const std::vector<int>& order) {
    GreedyResult r;
    double used = 0.0;
    for (int i : order) {
        if (used + inst.sizes[i] <= inst.capacity) {
            used += inst.sizes[i];
            r.selected.push_back(i);
            r.value += inst.values[i];
        }
    }
    std::sort(r.selected.begin(), r.selected.end());
    return r;
}

std::vector<int> order_by_score(const std::vector<double>& score) {
    std::vector<int> order(score.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return score[a] > score[b] || (score[a] == score[b] && a < b);
    });
    return order;
}

}  // namespace

GreedyResult knapsack_greedy(const KnapsackInstance& inst, double rho) {
    require(rho >= 0.0, "BadParams", "rho must be nonnegative");
    const std::size_t n = inst.n();
    std::vector<double> by_value(n), by_ratio(n);
    for (std::size_t i = 0; i < n; ++i) {
        by_value[i] = inst.values[i];
        // scored directly (not in log space) so exact score ties, e.g.
        // 0.6/2 == 0.9/3 at rho = 1, resolve by index as documented
        by_ratio[i] = inst.values[i] / std::pow(inst.sizes[i], rho);
    }
    GreedyResult a = pack_in_order(inst, order_by_score(by_value));
    GreedyResult b = pack_in_order(inst, order_by_score(by_ratio));
    return a.value >= b.value ? a : b;
}

UtilityCurve knapsack_curve(const KnapsackInstance& inst, double B) {
    require(B > 0.0, "BadParams", "B must be positive");
    const std::size_t n = inst.n();
    std::vector<double> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (inst.sizes[i] == inst.sizes[j]) continue;  // order never swaps
            const double rho = (std::log(inst.values[i]) - std::log(inst.values[j])) /
                               (std::log(inst.sizes[i]) - std::log(inst.sizes[j]));
            if (rho > 0.0 && rho < B) candidates.push_back(rho);
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::vector<piecewise::Piece> pieces;
    double lo = 0.0;
    for (std::size_t i = 0; i <= candidates.size(); ++i) {
        const double hi = (i == candidates.size()) ? B : candidates[i];
        pieces.push_back(
            piecewise::Piece::constant(lo, hi, knapsack_greedy(inst, 0.5 * (lo + hi)).value));
        lo = hi;
    }
    UtilityCurve curve;
    curve.fn = piecewise::make_piecewise(0.0, B, std::move(candidates), std::move(pieces));
    curve.h_bound = std::accumulate(inst.values.begin(), inst.values.end(), 0.0);
    curve.instance_tag = "knapsack";
    return curve;
}

GreedyResult mwis_greedy(const MwisInstance& inst, double rho, MwisDegreeMode mode) {
    require(rho >= 0.0, "BadParams", "rho must be nonnegative");
    const std::size_t n = inst.n();
    std::vector<int> deg0(n);
    for (std::size_t v = 0; v < n; ++v) deg0[v] = inst.degree(v);

    GreedyResult r;
    std::uint64_t alive = (n == 64) ? ~0ull : ((1ull << n) - 1);
    while (alive) {
        int best = -1;
        double best_score = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            if (!(alive & (1ull << v))) continue;
            const int deg = (mode == MwisDegreeMode::residual)
                                ? __builtin_popcountll(inst.nbr[v] & alive)
                                : deg0[v];
            const double score = inst.weights[v] / std::pow(1.0 + deg, rho);
            if (best < 0 || score > best_score) {
                best = static_cast<int>(v);
                best_score = score;
            }
        }
        r.selected.push_back(best);
        r.value += inst.weights[best];
        alive &= ~(inst.nbr[best] | (1ull << best));
    }
    std::sort(r.selected.begin(), r.selected.end());
    return r;
}

UtilityCurve mwis_curve(const MwisInstance& inst, double B, MwisDegreeMode mode) {
    require(B > 0.0, "BadParams", "B must be positive");
    const std::size_t n = inst.n();
    // conservative superset: degrees evolve as vertices are deleted, so all
    // divisor pairs d1 != d2 in {1..n} are candidates
    std::vector<double> candidates;
    std::vector<double> logd(n + 1);
    for (std::size_t d = 1; d <= n; ++d) logd[d] = std::log(static_cast<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dw = std::log(inst.weights[i]) - std::log(inst.weights[j]);
            for (std::size_t d1 = 1; d1 <= n; ++d1) {
                for (std::size_t d2 = d1 + 1; d2 <= n; ++d2) {
                    const double dd = logd[d1] - logd[d2];
                    for (double rho : {dw / dd, -dw / dd}) {
                        if (rho > 0.0 && rho < B) candidates.push_back(rho);
                    }
                }
            }
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::vector<piecewise::Piece> pieces;
    double lo = 0.0;
    for (std::size_t i = 0; i <= candidates.size(); ++i) {
        const double hi = (i == candidates.size()) ? B : candidates[i];
        pieces.push_back(
            piecewise::Piece::constant(lo, hi, mwis_greedy(inst, 0.5 * (lo + hi), mode).value));
        lo = hi;
    }
    UtilityCurve curve;
    curve.fn = piecewise::make_piecewise(0.0, B, std::move(candidates), std::move(pieces));
    curve.h_bound = std::accumulate(inst.weights.begin(), inst.weights.end(), 0.0);
    curve.instance_tag = "mwis";
    return curve;
}

double brute_force_knapsack(const KnapsackInstance& inst) {
    const std::size_t n = inst.n();
    require(n <= 22, "TooLarge", "subset enumeration capped at n = 22");
    double best = 0.0;
    const std::uint64_t full = 1ull << n;
    std::vector<double> value(full, 0.0), size(full, 0.0);
    for (std::uint64_t s = 1; s < full; ++s) {
        const std::uint64_t low = s & (~s + 1);
        const int i = __builtin_ctzll(low);
        value[s] = value[s ^ low] + inst.values[i];
        size[s] = size[s ^ low] + inst.sizes[i];
        if (size[s] <= inst.capacity) best = std::max(best, value[s]);
    }
    return best;
}

double brute_force_mwis(const MwisInstance& inst) {
    const std::size_t n = inst.n();
    require(n <= 18, "TooLarge", "subset enumeration capped at n = 18");
    const std::uint64_t full = 1ull << n;
    std::vector<double> weight(full, 0.0);
    std::vector<char> independent(full, 1);
    double best = 0.0;
    for (std::uint64_t s = 1; s < full; ++s) {
        const std::uint64_t low = s & (~s + 1);
        const int i = __builtin_ctzll(low);
        const std::uint64_t rest = s ^ low;
        independent[s] = independent[rest] && (inst.nbr[i] & rest) == 0;
        weight[s] = weight[rest] + inst.weights[i];
        if (independent[s]) best = std::max(best, weight[s]);
    }
    return best;
}

KnapsackInstance gen_knapsack_smoothed(int n, double kappa, double W, Rng& rng) {
    require(kappa >= 1.0, "BadKappa", "kappa must be at least 1 for values in (0,1]");
    require(n >= 1 && W >= 1.0, "BadParams", "need n >= 1 and W >= 1");
    KnapsackInstance inst;
    const double width = 1.0 / kappa;
    double total_size = 0.0;
    for (int i = 0; i < n; ++i) {
        const double anchor = rng.uniform(0.0, 1.0 - width);
        inst.values.push_back(std::max(anchor + width * rng.uniform01(), 1e-12));
        inst.sizes.push_back(rng.uniform(1.0, W));
        total_size += inst.sizes.back();
    }
    inst.capacity = rng.uniform(0.25, 0.5) * total_size;
    return inst;
}

MwisInstance gen_mwis_smoothed(int n, double kappa, double edge_p, Rng& rng) {
    require(kappa >= 1.0, "BadKappa", "kappa must be at least 1 for weights in (0,1]");
    require(n >= 1 && n <= 64 && edge_p >= 0.0 && edge_p <= 1.0, "BadParams",
            "need 1 <= n <= 64 and edge_p in [0,1]");
    const double width = 1.0 / kappa;
    std::vector<double> weights;
    for (int i = 0; i < n; ++i) {
        const double anchor = rng.uniform(0.0, 1.0 - width);
        weights.push_back(std::max(anchor + width * rng.uniform01(), 1e-12));
    }
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (rng.bernoulli(edge_p)) edges.emplace_back(u, v);
        }
    }
    return make_mwis(std::move(weights), edges);
}

}  // namespace pwlopt::greedy
