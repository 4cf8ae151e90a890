#include "pwlopt/online.hpp"

#include <algorithm>
#include <cmath>

#include "pwlopt/error.hpp"

namespace pwlopt::online {

double lambda_full_info(int d, double R, double w, int T, double H) {
    require(w > 0.0 && R > w, "BadGeometry", "need R > w > 0");
    require(d >= 1 && T >= 1 && H > 0.0, "BadParams", "need d >= 1, T >= 1, H > 0");
    return std::sqrt(d * std::log(R / w) / T) / H;
}

double lambda_private(double eps, double delta, int T, double H) {
    require(eps > 0.0 && eps <= 1.0 && delta > 0.0 && delta < 1.0, "BadPrivacyParams",
            "need eps in (0,1] and delta in (0,1)");
    require(T >= 1 && H > 0.0, "BadPrivacyParams", "need T >= 1 and H > 0");
    return eps / (4.0 * H * std::sqrt(2.0 * T * std::log(1.0 / delta)));
}

EwfLearner::EwfLearner(double lo, double hi, double lambda, double h_bound, Rng rng)
    : lo_(lo), hi_(hi), lambda_(lambda), h_bound_(h_bound),
      cum_(piecewise::constant_fn(lo, hi, 0.0)), rng_(rng) {
    require(lambda > 0.0 && lambda <= 1.0 / h_bound + 1e-12, "BadParams",
            "lambda must lie in (0, 1/H]");
}

double EwfLearner::play() { return piecewise::sample_exp(cum_, lambda_, rng_); }

void EwfLearner::update(const UtilityCurve& curve) {
    require(curve.fn.lo == lo_ && curve.fn.hi == hi_, "DomainMismatch",
            "curve domain must match the learner domain");
    require(curve.fn.min_value() >= -1e-9 && curve.fn.max_value() <= h_bound_ + 1e-9,
            "RangeViolation", "curve values must lie in [0, H]");
    cum_ = piecewise::sum2(cum_, curve.fn);
    ++t_;
}

std::vector<std::vector<double>> build_net(const std::vector<std::pair<double, double>>& box,
                                           double w, std::size_t max_points) {
    require(w > 0.0, "BadParams", "w must be positive");
    require(!box.empty(), "BadParams", "box must have at least one axis");
    const std::size_t d = box.size();
    const double axis_spacing = 2.0 * w / std::sqrt(static_cast<double>(d));

    std::vector<std::size_t> counts(d);
    std::size_t total = 1;
    for (std::size_t a = 0; a < d; ++a) {
        const double len = box[a].second - box[a].first;
        require(len > 0.0, "BadParams", "box axes must have positive length");
        counts[a] = static_cast<std::size_t>(std::ceil(len / axis_spacing));
        require(counts[a] <= max_points / total, "NetTooLarge",
                "net would exceed the point cap");
        total *= counts[a];
    }

    std::vector<std::vector<double>> net;
    net.reserve(total);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t p = 0; p < total; ++p) {
        std::vector<double> point(d);
        for (std::size_t a = 0; a < d; ++a) {
            const double cell = (box[a].second - box[a].first) / counts[a];
            point[a] = box[a].first + (idx[a] + 0.5) * cell;
        }
        net.push_back(std::move(point));
        for (std::size_t a = 0; a < d; ++a) {
            if (++idx[a] < counts[a]) break;
            idx[a] = 0;
        }
    }
    return net;
}

Exp3Bandit::Exp3Bandit(std::vector<double> arms, double eta, double gamma, double h_bound, Rng rng)
    : arms_(std::move(arms)), weights_(arms_.size(), 1.0), eta_(eta), gamma_(gamma),
      h_bound_(h_bound), rng_(rng) {
    require(!arms_.empty(), "BadParams", "need at least one arm");
    require(eta > 0.0 && gamma > 0.0 && gamma <= 1.0, "BadParams",
            "need eta > 0 and gamma in (0,1]");
    require(h_bound > 0.0, "BadParams", "need H > 0");
}

Exp3Bandit Exp3Bandit::with_horizon(std::vector<double> arms, int T, double h_bound, Rng rng) {
    require(T >= 1, "BadParams", "need T >= 1");
    const double K = static_cast<double>(arms.size());
    const double eta = std::sqrt(std::log(std::max(K, 2.0)) / (static_cast<double>(T) * K));
    const double gamma =
        std::min(1.0, std::sqrt(K * std::log(std::max(K, 2.0)) / ((std::exp(1.0) - 1.0) * T)));
    return Exp3Bandit(std::move(arms), eta, gamma, h_bound, rng);
}

std::vector<double> Exp3Bandit::mixture_probabilities() const {
    const std::size_t K = arms_.size();
    double total = 0.0;
    for (double w : weights_) total += w;
    std::vector<double> p(K);
    for (std::size_t i = 0; i < K; ++i) {
        p[i] = (1.0 - gamma_) * weights_[i] / total + gamma_ / static_cast<double>(K);
    }
    return p;
}

Exp3Bandit::Round Exp3Bandit::play_round(const std::function<double(double)>& payoff_of_arm) {
    const auto p = mixture_probabilities();
    const double u = rng_.uniform01();
    std::size_t chosen = p.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) {
            chosen = i;
            break;
        }
    }
    const double payoff = payoff_of_arm(arms_[chosen]);
    require(payoff >= -1e-9 && payoff <= h_bound_ + 1e-9, "PayoffOutOfRange",
            "payoffs must lie in [0, H]");
    const double estimate = (payoff / h_bound_) / p[chosen];
    weights_[chosen] *= std::exp(eta_ * estimate);

    double max_w = 0.0;
    for (double w : weights_) max_w = std::max(max_w, w);
    if (max_w > 1e100) {
        for (double& w : weights_) w /= max_w;
    }
    ++t_;
    return Round{chosen, arms_[chosen], payoff};
}

RegretLedger compute_regret(const std::vector<UtilityCurve>& curves,
                            const std::vector<double>& plays) {
    require(curves.size() == plays.size(), "LengthMismatch",
            "need one play per curve");
    RegretLedger ledger;
    if (curves.empty()) return ledger;

    const double lo = curves[0].fn.lo, hi = curves[0].fn.hi;
    PiecewiseFn1D prefix = piecewise::constant_fn(lo, hi, 0.0);
    double total = 0.0;
    for (std::size_t t = 0; t < curves.size(); ++t) {
        prefix = piecewise::sum2(prefix, curves[t].fn);
        const double u_t = piecewise::eval(curves[t].fn, plays[t]);
        total += u_t;
        ledger.plays.push_back(plays[t]);
        ledger.realized.push_back(u_t);
        ledger.cum_regret.push_back(piecewise::argmax(prefix).value - total);
    }
    const auto best = piecewise::argmax(prefix);
    ledger.opt = best.value;
    ledger.opt_rho = best.rho;
    ledger.regret = best.value - total;
    return ledger;
}

}  // namespace pwlopt::online
