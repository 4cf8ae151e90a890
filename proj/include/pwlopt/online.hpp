#ifndef PWLOPT_ONLINE_HPP
#define PWLOPT_ONLINE_HPP

#include <functional>
#include <vector>

#include "pwlopt/piecewise.hpp"
#include "pwlopt/rng.hpp"

namespace pwlopt::online {

using piecewise::PiecewiseFn1D;
using piecewise::UtilityCurve;

// Learning rate of the full-information forecaster: sqrt(d ln(R/w) / T) / H.
double lambda_full_info(int d, double R, double w, int T, double H);

// Learning rate making the forecaster (eps, delta)-differentially private:
// eps / (4 H sqrt(2 T ln(1/delta))).
double lambda_private(double eps, double delta, int T, double H);

// Full-information exponentially weighted forecaster on an interval. Keeps
// the unscaled cumulative utility U_t and applies lambda at sampling time, so
// one state can serve several lambda values and the private variant stays an
// exact exponential mechanism per round.
class EwfLearner {
public:
    EwfLearner(double lo, double hi, double lambda, double h_bound, Rng rng);

    // rho_t sampled with density proportional to exp(lambda * U_t).
    double play();

    // Observe the round's utility function and fold it into U.
    void update(const UtilityCurve& curve);

    const PiecewiseFn1D& cumulative() const { return cum_; }
    int round() const { return t_; }
    double lambda() const { return lambda_; }

private:
    double lo_, hi_, lambda_, h_bound_;
    PiecewiseFn1D cum_;
    int t_ = 0;
    Rng rng_;
};

// Covering net for an axis-aligned box: per-axis grid with spacing 2w/sqrt(d)
// (shrunk to fit), centers offset by half a cell, so every point of the box
// is within l2 distance w of some net point. Cardinality for a box inscribed
// in a radius-R ball stays within (3R/w)^d; the cap guards degenerate w.
std::vector<std::vector<double>> build_net(const std::vector<std::pair<double, double>>& box,
                                           double w, std::size_t max_points = 1000000);

// Exp3 over a fixed arm set. Sampling distribution mixes the weight
// distribution with uniform exploration; updates use the importance-weighted
// payoff estimate of the chosen arm scaled to [0,1] by H.
class Exp3Bandit {
public:
    Exp3Bandit(std::vector<double> arms, double eta, double gamma, double h_bound, Rng rng);

    // Textbook parameters: eta = sqrt(ln K / (T K)),
    // gamma = min(1, sqrt(K ln K / ((e-1) T))).
    static Exp3Bandit with_horizon(std::vector<double> arms, int T, double h_bound, Rng rng);

    struct Round {
        std::size_t arm_index;
        double arm;
        double payoff;
    };

    // Plays one round: samples an arm, queries its payoff, updates weights.
    Round play_round(const std::function<double(double)>& payoff_of_arm);

    std::vector<double> mixture_probabilities() const;
    const std::vector<double>& arms() const { return arms_; }

private:
    std::vector<double> arms_;
    std::vector<double> weights_;
    double eta_, gamma_, h_bound_;
    int t_ = 0;
    Rng rng_;
};

struct RegretLedger {
    std::vector<double> plays;          // rho_t
    std::vector<double> realized;       // u_t(rho_t)
    std::vector<double> cum_regret;     // prefix hindsight OPT minus prefix payoff
    double opt = 0.0;                   // max_rho sum_t u_t(rho)
    double opt_rho = 0.0;
    double regret = 0.0;                // opt - total realized
};

// Regret accounting for a completed run: OPT via argmax of the summed curves,
// realized utilities via eval, prefix regret per round.
RegretLedger compute_regret(const std::vector<UtilityCurve>& curves,
                            const std::vector<double>& plays);

}  // namespace pwlopt::online

#endif
