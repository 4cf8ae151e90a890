#ifndef PWLOPT_GREEDY_HPP
#define PWLOPT_GREEDY_HPP

#include <cstdint>
#include <vector>

#include "pwlopt/piecewise.hpp"
#include "pwlopt/rng.hpp"

namespace pwlopt::greedy {

using piecewise::UtilityCurve;

// Knapsack instance: values in (0,1], sizes in [1,W], capacity C > 0.
struct KnapsackInstance {
    std::vector<double> values;
    std::vector<double> sizes;
    double capacity = 0.0;

    std::size_t n() const { return values.size(); }
};

// Vertex-weighted graph, weights in (0,1]. Adjacency kept as bitmasks,
// so n is capped at 64 (brute force needs n <= 18 anyway).
struct MwisInstance {
    std::vector<double> weights;
    std::vector<std::uint64_t> nbr;  // nbr[v] has bit u set iff {u,v} is an edge

    std::size_t n() const { return weights.size(); }
    void add_edge(std::size_t u, std::size_t v);
    int degree(std::size_t v) const;
    int max_degree() const;
};

MwisInstance make_mwis(std::vector<double> weights,
                       const std::vector<std::pair<int, int>>& edges);

struct GreedyResult {
    std::vector<int> selected;
    double value = 0.0;
};

enum class MwisDegreeMode { residual, original };

// Runs both greedy orders (by value; by value/size^rho), packing feasibly in
// order and skipping items that do not fit; returns the better of the two.
// Score ties break toward the lower item index.
GreedyResult knapsack_greedy(const KnapsackInstance& inst, double rho);

// Exact utility-vs-rho curve on [0, B]. Candidate breakpoints are the order
// swaps (ln v_i - ln v_j)/(ln s_i - ln s_j); every discontinuity lies in that
// set, so evaluating the greedy at piece midpoints reconstructs the curve.
UtilityCurve knapsack_curve(const KnapsackInstance& inst, double B);

// Repeatedly selects argmax of w(v)/(1+deg(v))^rho over the residual graph
// and deletes the chosen vertex with its neighbors. Residual degrees by
// default; the original-degree variant is kept for comparison.
GreedyResult mwis_greedy(const MwisInstance& inst, double rho,
                         MwisDegreeMode mode = MwisDegreeMode::residual);

// Exact curve on [0, B] from the conservative candidate set
// (ln w_i - ln w_j)/(ln d1 - ln d2) over all weight pairs and degree pairs.
UtilityCurve mwis_curve(const MwisInstance& inst, double B,
                        MwisDegreeMode mode = MwisDegreeMode::residual);

// Oracles by subset enumeration.
double brute_force_knapsack(const KnapsackInstance& inst);  // n <= 22
double brute_force_mwis(const MwisInstance& inst);          // n <= 18

// Smoothed generators: values/weights independently uniform on per-item
// windows of width 1/kappa inside (0,1]; knapsack sizes uniform on [1,W]
// independent of values; MWIS edges Erdos-Renyi(p).
KnapsackInstance gen_knapsack_smoothed(int n, double kappa, double W, Rng& rng);
MwisInstance gen_mwis_smoothed(int n, double kappa, double edge_p, Rng& rng);

}  // namespace pwlopt::greedy

#endif
