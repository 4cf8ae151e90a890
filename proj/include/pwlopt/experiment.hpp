#ifndef PWLOPT_EXPERIMENT_HPP
#define PWLOPT_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pwlopt/adversary.hpp"
#include "pwlopt/dispersion.hpp"
#include "pwlopt/online.hpp"

namespace pwlopt::experiment {

// One experiment run: a named pipeline, a stream family, and explicit seeds
// (no ambient entropy anywhere, reproducibility is the product).
struct Config {
    std::string name = "run";
    std::string pipeline;  // online_full_info | online_private | bandit |
                           // private_batch | dispersion_audit | rademacher_audit
    std::string family = "knapsack";
    int T = 100;
    std::vector<std::uint64_t> seeds;
    adversary::FamilyParams params;
    double epsilon = 1.0;
    double delta = 0.01;
    int arms = 32;          // bandit net size
    double lambda = 0.0;    // 0 = pipeline default
    std::string out_dir;    // optional; CLI/env supply a default
};

// Parses and validates a config document; throws ConfigError naming the
// offending field.
Config parse_config(const std::string& json_text);

// The weight-ratio audit of the forecaster run: for each (w, k) of the
// stream's empirical dispersion profile,
//   ln(W_{T+1}/W_1) >= lambda (OPT - H k - L T w) + ln(w'/R),  w' = min(w, R)
// The returned margin is the worst lhs - rhs over the profile.
double weight_ratio_margin(const std::vector<piecewise::UtilityCurve>& curves, double lambda,
                           double h_bound, double lipschitz,
                           const dispersion::DispersionProfile& profile);

struct RunOutput {
    std::string summary_json;                 // canonical summary document
    std::vector<std::string> file_names;      // files written under out_dir
    bool all_checks_pass = true;
};

// Executes the configured pipeline and writes a CSV trajectory per seed plus
// summary.json into out_dir (created if needed). Byte-identical outputs for
// identical (config, seeds).
RunOutput run_experiment(const Config& config, const std::string& out_dir);

// Default output directory resolution: config value, then the PWLOPT_OUTDIR
// environment variable, then ./runs/<name>.
std::string resolve_out_dir(const Config& config, const std::string& cli_override);

}  // namespace pwlopt::experiment

#endif
