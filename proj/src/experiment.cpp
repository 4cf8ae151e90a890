#include "pwlopt/experiment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "pwlopt/error.hpp"
#include "pwlopt/privacy.hpp"
#include "pwlopt/rademacher.hpp"

namespace pwlopt::experiment {

namespace {

using nlohmann::json;
using piecewise::UtilityCurve;

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

const char* kPipelines[] = {"online_full_info", "online_private",   "bandit",
                            "private_batch",    "dispersion_audit", "rademacher_audit"};
const char* kFamilies[] = {"knapsack", "mwis", "owr", "pricing_1d", "second_price_1d"};

template <typename T, std::size_t N>
bool one_of(const T& value, const char* const (&options)[N]) {
    for (const char* o : options) {
        if (value == o) return true;
    }
    return false;
}

double get_number(const json& j, const char* field, double fallback) {
    if (!j.contains(field)) return fallback;
    require(j[field].is_number(), "ConfigError", std::string(field) + " must be a number");
    return j[field].get<double>();
}

}  // namespace

Config parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        fail("ConfigError", std::string("invalid JSON: ") + e.what());
    }
    Config c;
    require(j.contains("pipeline") && j["pipeline"].is_string(), "ConfigError",
            "pipeline: required string field");
    c.pipeline = j["pipeline"].get<std::string>();
    require(one_of(c.pipeline, kPipelines), "ConfigError", "pipeline: unknown name " + c.pipeline);

    if (j.contains("name")) c.name = j["name"].get<std::string>();
    if (j.contains("family")) {
        require(j["family"].is_string(), "ConfigError", "family: must be a string");
        c.family = j["family"].get<std::string>();
        require(one_of(c.family, kFamilies), "ConfigError", "family: unknown name " + c.family);
    }
    require(j.contains("seeds") && j["seeds"].is_array() && !j["seeds"].empty(), "ConfigError",
            "seeds: required nonempty array (seeds are mandatory)");
    for (const auto& s : j["seeds"]) {
        require(s.is_number_unsigned() || s.is_number_integer(), "ConfigError",
                "seeds: entries must be integers");
        c.seeds.push_back(s.get<std::uint64_t>());
    }
    c.T = static_cast<int>(get_number(j, "T", c.T));
    require(c.T >= 0, "ConfigError", "T: must be nonnegative");

    c.params.n = static_cast<int>(get_number(j, "n", c.params.n));
    c.params.kappa = get_number(j, "kappa", c.params.kappa);
    c.params.B = get_number(j, "B", c.params.B);
    c.params.W = get_number(j, "W", c.params.W);
    c.params.edge_p = get_number(j, "edge_p", c.params.edge_p);
    c.params.n_buyers = static_cast<int>(get_number(j, "n_buyers", c.params.n_buyers));
    c.epsilon = get_number(j, "epsilon", c.epsilon);
    c.delta = get_number(j, "delta", c.delta);
    c.arms = static_cast<int>(get_number(j, "arms", c.arms));
    c.lambda = get_number(j, "lambda", c.lambda);
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();

    for (const auto& [key, value] : j.items()) {
        static const char* known[] = {"pipeline", "name",  "family", "seeds",   "T",
                                      "n",        "kappa", "B",      "W",       "edge_p",
                                      "n_buyers", "epsilon", "delta", "arms",   "lambda",
                                      "out_dir"};
        require(one_of(key, known), "ConfigError", "unknown field: " + key);
    }
    return c;
}

double weight_ratio_margin(const std::vector<UtilityCurve>& curves, double lambda, double h_bound,
                           double lipschitz, const dispersion::DispersionProfile& profile) {
    require(!curves.empty(), "BadParams", "need a nonempty stream");
    const double lo = curves[0].fn.lo, hi = curves[0].fn.hi;
    const double R = hi - lo;

    std::vector<piecewise::PiecewiseFn1D> fns;
    fns.reserve(curves.size());
    for (const auto& c : curves) fns.push_back(c.fn);
    const auto total = piecewise::sum(fns, lo, hi);
    const double opt = piecewise::argmax(total).value;

    const double lhs =
        piecewise::log_exp_integral(total, lambda, lo, hi) - std::log(R);  // ln W_1 = ln |domain|
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < profile.ws.size(); ++i) {
        const double w = profile.ws[i];
        const double k = profile.ks[i];
        const double w_eff = std::min(w, R);
        const double rhs = lambda * (opt - h_bound * k - lipschitz * curves.size() * w) +
                           std::log(w_eff / R);
        worst = std::min(worst, lhs - rhs);
    }
    return worst;
}

namespace {

struct SummaryBuilder {
    json doc;
    bool all_pass = true;

    void check(const std::string& name, bool pass, json detail) {
        detail["pass"] = pass;
        doc["checks"][name] = std::move(detail);
        all_pass = all_pass && pass;
    }
};

std::vector<double> profile_radii(double domain_len, int T) {
    const double base = domain_len / std::sqrt(std::max(T, 4));
    return {0.5 * base, base, 2.0 * base, 4.0 * base};
}

json profile_to_json(const dispersion::DispersionProfile& p) {
    json j = json::array();
    for (std::size_t i = 0; i < p.ws.size(); ++i) {
        j.push_back({{"w", p.ws[i]}, {"k", p.ks[i]}});
    }
    return j;
}

std::string trajectory_csv(const online::RegretLedger& ledger) {
    std::string out = "t,rho,u,cum_regret\n";
    for (std::size_t t = 0; t < ledger.plays.size(); ++t) {
        out += std::to_string(t + 1);
        out += ',';
        out += fmt_double(ledger.plays[t]);
        out += ',';
        out += fmt_double(ledger.realized[t]);
        out += ',';
        out += fmt_double(ledger.cum_regret[t]);
        out += '\n';
    }
    return out;
}

double family_lipschitz(const std::string& family) {
    // revenue curves of the pricing families have unit-slope pieces
    return (family == "pricing_1d" || family == "second_price_1d") ? 1.0 : 0.0;
}

// Density bound on a single curve's breakpoint locations under the smoothed
// generators: log-ratio breakpoints inherit kappa*ln(W)/2 (knapsack) or
// kappa*ln(n)/2 (mwis); outward-rotation angles are uniform (1/pi); pricing
// breakpoints are the values themselves (kappa).
double family_kappa_prime(const Config& c) {
    if (c.family == "knapsack") return 0.5 * c.params.kappa * std::log(std::max(c.params.W, 1.1));
    if (c.family == "mwis") return 0.5 * c.params.kappa * std::log(std::max(c.params.n, 2));
    if (c.family == "owr") return 1.0 / 3.141592653589793;
    return c.params.kappa;
}

void online_pipeline(const Config& c, bool privately, SummaryBuilder& sb,
                     std::vector<std::pair<std::string, std::string>>& files) {
    json per_seed = json::array();
    double worst_margin = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed : c.seeds) {
        Rng rng(seed);
        const auto stream = adversary::adversary_smoothed(c.family, c.T, rng, c.params);
        const double R = stream.domain_hi - stream.domain_lo;
        const double w_target = R / std::sqrt(std::max(c.T, 4));
        double lambda = c.lambda;
        if (lambda <= 0.0) {
            lambda = privately
                         ? online::lambda_private(c.epsilon, c.delta, std::max(c.T, 1), stream.h_bound)
                         : online::lambda_full_info(1, R, w_target, std::max(c.T, 1), stream.h_bound);
        }
        online::EwfLearner learner(stream.domain_lo, stream.domain_hi, lambda, stream.h_bound,
                                   rng.fork(1));
        std::vector<double> plays;
        for (const auto& curve : stream.curves) {
            plays.push_back(learner.play());
            learner.update(curve);
        }
        const auto ledger = online::compute_regret(stream.curves, plays);
        const auto profile =
            dispersion::empirical_profile(stream.curves, profile_radii(R, std::max(c.T, 4)));
        const double margin = c.T > 0
                                  ? weight_ratio_margin(stream.curves, lambda, stream.h_bound,
                                                        family_lipschitz(c.family), profile)
                                  : 0.0;
        worst_margin = std::min(worst_margin, margin);

        json row;
        row["seed"] = seed;
        row["lambda"] = lambda;
        row["opt"] = ledger.opt;
        row["opt_rho"] = ledger.opt_rho;
        row["regret"] = ledger.regret;
        row["avg_regret"] = c.T > 0 ? ledger.regret / c.T : 0.0;
        row["weight_ratio_margin"] = margin;
        row["dispersion"] = profile_to_json(profile);
        per_seed.push_back(std::move(row));
        files.emplace_back("trajectory_seed" + std::to_string(seed) + ".csv",
                           trajectory_csv(ledger));
    }
    std::vector<double> regrets;
    for (const auto& row : per_seed) regrets.push_back(row["regret"].get<double>());
    std::sort(regrets.begin(), regrets.end());
    sb.doc["per_seed"] = std::move(per_seed);
    sb.doc["median_regret"] = regrets[regrets.size() / 2];
    sb.check("weight_ratio", worst_margin >= -1e-6, {{"worst_margin", worst_margin}});
}

void bandit_pipeline(const Config& c, SummaryBuilder& sb,
                     std::vector<std::pair<std::string, std::string>>& files) {
    require(c.arms >= 1, "ConfigError", "arms: must be at least 1");
    json per_seed = json::array();
    for (std::uint64_t seed : c.seeds) {
        Rng rng(seed);
        const auto stream = adversary::adversary_smoothed(c.family, c.T, rng, c.params);
        const double R = stream.domain_hi - stream.domain_lo;
        // net with exactly `arms` points: covering radius R / (2 arms)
        const auto net =
            online::build_net({{stream.domain_lo, stream.domain_hi}}, R / (2.0 * c.arms));
        std::vector<double> arm_values;
        for (const auto& p : net) arm_values.push_back(p[0]);
        auto bandit = online::Exp3Bandit::with_horizon(arm_values, std::max(c.T, 1),
                                                       stream.h_bound, rng.fork(2));
        std::vector<double> arm_totals(arm_values.size(), 0.0);
        std::vector<double> plays;
        double realized = 0.0;
        std::string csv = "t,rho,u,cum_regret\n";
        for (int t = 0; t < c.T; ++t) {
            const auto& curve = stream.curves[t];
            const auto round =
                bandit.play_round([&](double rho) { return piecewise::eval(curve.fn, rho); });
            plays.push_back(round.arm);
            realized += round.payoff;
            for (std::size_t a = 0; a < arm_values.size(); ++a) {
                arm_totals[a] += piecewise::eval(curve.fn, arm_values[a]);
            }
            const double best_arm_so_far = *std::max_element(arm_totals.begin(), arm_totals.end());
            csv += std::to_string(t + 1) + ',' + fmt_double(round.arm) + ',' +
                   fmt_double(round.payoff) + ',' + fmt_double(best_arm_so_far - realized) + '\n';
        }
        const double best_arm = arm_totals.empty()
                                    ? 0.0
                                    : *std::max_element(arm_totals.begin(), arm_totals.end());
        json row;
        row["seed"] = seed;
        row["arms"] = arm_values.size();
        row["best_arm_total"] = best_arm;
        row["realized_total"] = realized;
        row["net_regret"] = best_arm - realized;
        per_seed.push_back(std::move(row));
        files.emplace_back("trajectory_seed" + std::to_string(seed) + ".csv", csv);
    }
    std::vector<double> regrets;
    double h_bound = 1.0;
    for (const auto& row : per_seed) regrets.push_back(row["net_regret"].get<double>());
    std::sort(regrets.begin(), regrets.end());
    {
        Rng probe(c.seeds[0]);
        h_bound = adversary::adversary_smoothed(c.family, 0, probe, c.params).h_bound;
    }
    const double K = std::max<double>(1.0, c.arms);
    const double envelope = 3.0 * h_bound * std::sqrt(std::max(c.T, 1) * K * std::log(std::max(K, 2.0)));
    sb.doc["per_seed"] = std::move(per_seed);
    sb.doc["median_net_regret"] = regrets[regrets.size() / 2];
    sb.doc["exp3_envelope"] = envelope;
    sb.check("exp3_regret_envelope", regrets[regrets.size() / 2] <= envelope,
             {{"median_net_regret", regrets[regrets.size() / 2]}, {"envelope", envelope}});
}

void private_batch_pipeline(const Config& c, SummaryBuilder& sb,
                            std::vector<std::pair<std::string, std::string>>& files) {
    json per_seed = json::array();
    bool util_ok = true, ratio_ok = true;
    for (std::uint64_t seed : c.seeds) {
        Rng rng(seed);
        auto stream = adversary::adversary_smoothed(c.family, c.T, rng, c.params);
        require(!stream.curves.empty(), "ConfigError", "T: private_batch needs T >= 1");
        const double R = stream.domain_hi - stream.domain_lo;
        Rng mech_rng = rng.fork(3);
        const double rho_hat =
            privacy::exp_mech_1d(stream.curves, c.epsilon, stream.h_bound, mech_rng);

        std::vector<piecewise::PiecewiseFn1D> fns;
        for (const auto& cu : stream.curves) fns.push_back(cu.fn);
        const auto total = piecewise::sum(fns, stream.domain_lo, stream.domain_hi);
        const double n = static_cast<double>(stream.curves.size());
        const double subopt =
            (piecewise::argmax(total).value - piecewise::eval(total, rho_hat)) / n;

        const auto profile = dispersion::empirical_profile(
            stream.curves, profile_radii(R, static_cast<int>(stream.curves.size())));
        double bound = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < profile.ws.size(); ++i) {
            bound = std::min(bound, privacy::utility_bound(
                                        c.epsilon, 0.05, stream.h_bound, 1, R, profile.ws[i],
                                        profile.ks[i], family_lipschitz(c.family),
                                        static_cast<int>(stream.curves.size())));
        }
        util_ok = util_ok && subopt <= bound;

        // privacy audit on a neighboring multiset: swap out the last curve
        auto neighbor = stream.curves;
        Rng alt = rng.fork(4);
        neighbor.back() = adversary::adversary_smoothed(c.family, 1, alt, c.params).curves[0];
        neighbor.back().h_bound = stream.h_bound;
        const double ratio = privacy::privacy_ratio_check(stream.curves, neighbor, c.epsilon);
        ratio_ok = ratio_ok && ratio <= c.epsilon + 1e-9;

        json row;
        row["seed"] = seed;
        row["rho_hat"] = rho_hat;
        row["avg_suboptimality"] = subopt;
        row["utility_bound"] = bound;
        row["privacy_ratio"] = ratio;
        row["dispersion"] = profile_to_json(profile);
        per_seed.push_back(std::move(row));
    }
    sb.doc["per_seed"] = std::move(per_seed);
    sb.check("utility_bound", util_ok, {{"zeta", 0.05}});
    sb.check("privacy_ratio", ratio_ok, {{"epsilon", c.epsilon}});
    (void)files;
}

void dispersion_audit_pipeline(const Config& c, SummaryBuilder& sb) {
    json per_seed = json::array();
    bool kappa_ok = true;
    for (std::uint64_t seed : c.seeds) {
        Rng rng(seed);
        const auto stream = adversary::adversary_smoothed(c.family, c.T, rng, c.params);
        const double R = stream.domain_hi - stream.domain_lo;
        const auto bps = dispersion::collect_breakpoints(stream.curves);
        std::vector<double> points;
        for (const auto& [x, idx] : bps) points.push_back(x);

        const double kappa_prime = family_kappa_prime(c);
        const double r = std::max<double>(1.0, points.size());
        const double w = 1.0 / (kappa_prime * std::sqrt(r));
        const auto report = dispersion::kappa_check(points, kappa_prime, w, 0.05);
        kappa_ok = kappa_ok && report.pass;

        const auto profile =
            dispersion::empirical_profile(stream.curves, profile_radii(R, std::max(c.T, 4)));
        json row;
        row["seed"] = seed;
        row["breakpoints"] = points.size();
        row["kappa_observed"] = report.observed_k;
        row["kappa_bound"] = report.bound_k;
        row["dispersion"] = profile_to_json(profile);
        per_seed.push_back(std::move(row));
    }
    sb.doc["per_seed"] = std::move(per_seed);
    sb.check("kappa_concentration", kappa_ok, json::object());
}

void rademacher_audit_pipeline(const Config& c, SummaryBuilder& sb) {
    json per_seed = json::array();
    bool ordered = true;
    for (std::uint64_t seed : c.seeds) {
        Rng rng(seed);
        auto stream = adversary::adversary_smoothed(c.family, c.T, rng, c.params);
        // normalize to [0,1] so estimate and bound share the range convention
        for (auto& cu : stream.curves) {
            cu.fn = piecewise::scale(cu.fn, 1.0 / stream.h_bound);
            cu.h_bound = 1.0;
        }
        Rng sigma_rng = rng.fork(5);
        const auto est = rademacher::empirical_rademacher(stream.curves, 40, sigma_rng);
        const double R = stream.domain_hi - stream.domain_lo;
        const auto profile =
            dispersion::empirical_profile(stream.curves, profile_radii(R, std::max(c.T, 4)));
        double bound = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < profile.ws.size(); ++i) {
            bound = std::min(bound,
                             rademacher::rademacher_bound(1, R, profile.ws[i],
                                                          family_lipschitz(c.family) / stream.h_bound,
                                                          profile.ks[i], std::max(c.T, 1)));
        }
        ordered = ordered && est.mean <= bound;
        json row;
        row["seed"] = seed;
        row["estimate"] = est.mean;
        row["std_error"] = est.std_error;
        row["bound"] = bound;
        per_seed.push_back(std::move(row));
    }
    sb.doc["per_seed"] = std::move(per_seed);
    sb.check("estimate_below_bound", ordered, json::object());
}

}  // namespace

std::string resolve_out_dir(const Config& config, const std::string& cli_override) {
    if (!cli_override.empty()) return cli_override;
    if (!config.out_dir.empty()) return config.out_dir;
    if (const char* env = std::getenv("PWLOPT_OUTDIR"); env && *env) {
        return std::string(env) + "/" + config.name;
    }
    return "runs/" + config.name;
}

RunOutput run_experiment(const Config& c, const std::string& out_dir) {
    SummaryBuilder sb;
    sb.doc["pipeline"] = c.pipeline;
    sb.doc["family"] = c.family;
    sb.doc["T"] = c.T;
    sb.doc["seeds"] = c.seeds;

    std::vector<std::pair<std::string, std::string>> files;
    if (c.pipeline == "online_full_info") {
        online_pipeline(c, false, sb, files);
    } else if (c.pipeline == "online_private") {
        online_pipeline(c, true, sb, files);
    } else if (c.pipeline == "bandit") {
        bandit_pipeline(c, sb, files);
    } else if (c.pipeline == "private_batch") {
        private_batch_pipeline(c, sb, files);
    } else if (c.pipeline == "dispersion_audit") {
        dispersion_audit_pipeline(c, sb);
    } else if (c.pipeline == "rademacher_audit") {
        rademacher_audit_pipeline(c, sb);
    } else {
        fail("ConfigError", "pipeline: unknown name " + c.pipeline);
    }

    sb.doc["all_pass"] = sb.all_pass;

    RunOutput out;
    out.summary_json = sb.doc.dump(2) + "\n";
    out.all_checks_pass = sb.all_pass;

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    files.emplace_back("summary.json", out.summary_json);
    std::sort(files.begin(), files.end());
    for (const auto& [name, content] : files) {
        std::ofstream stream(fs::path(out_dir) / name, std::ios::binary);
        require(stream.good(), "IoError", "cannot open " + name + " for writing");
        stream << content;
        require(stream.good(), "IoError", "failed writing " + name);
        out.file_names.push_back(name);
    }
    return out;
}

}  // namespace pwlopt::experiment
