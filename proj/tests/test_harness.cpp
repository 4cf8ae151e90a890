#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pwlopt/adversary.hpp"
#include "pwlopt/dispersion.hpp"
#include "pwlopt/experiment.hpp"
#include "test_util.hpp"

using namespace pwlopt;
using namespace pwlopt::adversary;
using namespace pwlopt::experiment;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

FamilyParams small_params() {
    FamilyParams p;
    p.n = 6;
    p.kappa = 2.0;
    p.B = 5.0;
    p.W = 4.0;
    return p;
}

}  // namespace

TEST_CASE("adversary_smoothed basic contracts") {
    Rng rng(1);
    CHECK(adversary_smoothed("knapsack", 0, rng, small_params()).curves.empty());
    CHECK_THROWS_AS(adversary_smoothed("nope", 5, rng, small_params()), Error);

    // fixed seed reproduces the stream exactly
    for (const char* family : {"knapsack", "mwis", "owr", "pricing_1d", "second_price_1d"}) {
        Rng a(42), b(42);
        const auto s1 = adversary_smoothed(family, 4, a, small_params());
        const auto s2 = adversary_smoothed(family, 4, b, small_params());
        REQUIRE(s1.curves.size() == 4);
        for (int t = 0; t < 4; ++t) {
            CHECK(s1.curves[t].fn == s2.curves[t].fn);
            CHECK(s1.curves[t].fn.min_value() >= -1e-9);
            CHECK(s1.curves[t].fn.max_value() <= s1.h_bound + 1e-9);
        }
    }
}

TEST_CASE("stream breakpoints pass the family kappa check") {
    // knapsack breakpoints inherit a kappa*ln(W)/2 density bound
    const auto p = small_params();
    const double kappa_prime = 0.5 * p.kappa * std::log(p.W);
    int passes = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        const auto stream = adversary_smoothed("knapsack", 60, rng, p);
        std::vector<double> pts;
        for (const auto& [x, idx] : dispersion::collect_breakpoints(stream.curves)) {
            pts.push_back(x);
        }
        const double w = 1.0 / (kappa_prime * std::sqrt(std::max<double>(1.0, pts.size())));
        passes += dispersion::kappa_check(pts, kappa_prime, w, 0.05).pass ? 1 : 0;
    }
    CHECK(passes >= 19);
}

TEST_CASE("adversary_weed composition") {
    CHECK_THROWS_AS([] {
        Rng rng(1);
        return adversary_weed(8, rng);
    }(), Error);

    const int T = 10000;
    Rng rng(5);
    const auto upper = adversary_weed(T, rng, WeedSide::upper);
    int ones = 0;
    for (const auto& c : upper.curves) {
        REQUIRE(c.fn.breakpoints.size() == 1);
        CHECK(c.fn.breakpoints[0] == 0.5);
        ones += piecewise::eval(c.fn, 0.75) == 1.0 ? 1 : 0;
    }
    // frequency of u1 near 1/2 + 1/(8 sqrt(T)) within 3 binomial sd
    const double want = 0.5 + 1.0 / (8.0 * std::sqrt(static_cast<double>(T)));
    const double sd = std::sqrt(want * (1.0 - want) / T);
    CHECK(std::abs(ones / static_cast<double>(T) - want) <= 3.0 * sd);

    Rng rng2(5);
    const auto lower = adversary_weed(T, rng2, WeedSide::lower);
    int lower_ones = 0;
    for (const auto& c : lower.curves) lower_ones += piecewise::eval(c.fn, 0.75) == 1.0 ? 1 : 0;
    CHECK(lower_ones < ones);
}

TEST_CASE("parse_config diagnostics") {
    CHECK_THROWS_AS(parse_config("{"), Error);
    CHECK_THROWS_AS(parse_config(R"({"pipeline":"bogus","seeds":[1]})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"pipeline":"bandit"})"), Error);  // seeds mandatory
    CHECK_THROWS_AS(parse_config(R"({"pipeline":"bandit","seeds":[1],"wat":3})"), Error);

    const auto c = parse_config(
        R"({"pipeline":"online_full_info","family":"mwis","T":12,"seeds":[1,2],"kappa":3.0})");
    CHECK(c.pipeline == "online_full_info");
    CHECK(c.family == "mwis");
    CHECK(c.T == 12);
    CHECK(c.params.kappa == 3.0);
}

TEST_CASE("run_experiment writes deterministic reports") {
    const auto config = parse_config(
        R"({"pipeline":"online_full_info","family":"knapsack","T":25,"seeds":[3,4],
            "n":6,"kappa":2.0,"B":5.0,"W":4.0})");
    const auto out1 = run_experiment(config, "runs/_t1");
    const auto out2 = run_experiment(config, "runs/_t2");
    CHECK(out1.file_names == out2.file_names);
    for (const auto& name : out1.file_names) {
        CHECK(slurp("runs/_t1/" + name) == slurp("runs/_t2/" + name));
    }
    // trajectory has one row per round plus the header
    const auto csv = slurp("runs/_t1/trajectory_seed3.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 26);
    CHECK(csv.rfind("t,rho,u,cum_regret\n", 0) == 0);

    // the summary regret equals the ledger's final cumulative regret
    const auto summary = nlohmann::json::parse(out1.summary_json);
    const double reported = summary["per_seed"][0]["regret"].get<double>();
    std::istringstream rows(csv.substr(csv.find('\n') + 1));
    std::string line, last;
    while (std::getline(rows, line)) {
        if (!line.empty()) last = line;
    }
    const double final_cum = std::stod(last.substr(last.rfind(',') + 1));
    CHECK(reported == doctest::Approx(final_cum).epsilon(1e-12));
}

namespace {

// the summary document's schema: required fields with the right json types
void validate_summary(const nlohmann::json& s) {
    REQUIRE(s.at("pipeline").is_string());
    REQUIRE(s.at("family").is_string());
    REQUIRE(s.at("T").is_number_integer());
    REQUIRE(s.at("seeds").is_array());
    REQUIRE(s.at("all_pass").is_boolean());
    REQUIRE(s.at("per_seed").is_array());
    for (const auto& row : s.at("per_seed")) {
        REQUIRE(row.at("seed").is_number());
    }
    REQUIRE(s.at("checks").is_object());
    for (const auto& [name, detail] : s.at("checks").items()) {
        REQUIRE(!name.empty());
        REQUIRE(detail.at("pass").is_boolean());
    }
}

}  // namespace

TEST_CASE("every pipeline runs end to end") {
    const char* configs[] = {
        R"({"pipeline":"online_full_info","family":"mwis","T":10,"seeds":[1],"n":6,"B":5.0})",
        R"({"pipeline":"online_private","family":"knapsack","T":10,"seeds":[1],"n":6,"B":5.0,
            "W":4.0,"epsilon":0.5,"delta":0.05})",
        R"({"pipeline":"bandit","family":"pricing_1d","T":60,"seeds":[1],"arms":8,"W":4.0})",
        R"({"pipeline":"private_batch","family":"knapsack","T":40,"seeds":[1,2],"n":6,"B":5.0,
            "W":4.0,"epsilon":1.0})",
        R"({"pipeline":"dispersion_audit","family":"knapsack","T":40,"seeds":[1,2],"n":6,"B":5.0,
            "W":4.0})",
        R"({"pipeline":"rademacher_audit","family":"knapsack","T":50,"seeds":[1],"n":6,"B":5.0,
            "W":4.0})",
    };
    int idx = 0;
    for (const char* doc : configs) {
        const auto config = parse_config(doc);
        const auto out = run_experiment(config, "runs/_pipe" + std::to_string(idx++));
        CHECK(out.all_checks_pass);
        const auto summary = nlohmann::json::parse(out.summary_json);
        CHECK(summary["all_pass"].get<bool>());
        validate_summary(summary);
    }
}

TEST_CASE("empty horizon produces header-only trajectories") {
    const auto config = parse_config(
        R"({"pipeline":"online_full_info","family":"knapsack","T":0,"seeds":[1],"n":6,"B":5.0,"W":4.0})");
    const auto out = run_experiment(config, "runs/_t0");
    CHECK(out.all_checks_pass);
    CHECK(slurp("runs/_t0/trajectory_seed1.csv") == "t,rho,u,cum_regret\n");
}

TEST_CASE("weight_ratio_margin nonnegative on forecaster streams") {
    Rng rng(9);
    const auto stream = adversary_smoothed("knapsack", 60, rng, small_params());
    const double R = stream.domain_hi - stream.domain_lo;
    const double lambda = 0.02;
    const auto profile = dispersion::empirical_profile(
        stream.curves, {0.05 * R, 0.1 * R, 0.2 * R});
    CHECK(weight_ratio_margin(stream.curves, lambda, stream.h_bound, 0.0, profile) >= -1e-6);
}

TEST_CASE("resolve_out_dir precedence") {
    Config c;
    c.name = "demo";
    CHECK(resolve_out_dir(c, "explicit") == "explicit");
    c.out_dir = "from_config";
    CHECK(resolve_out_dir(c, "") == "from_config");
    c.out_dir.clear();
    ::setenv("PWLOPT_OUTDIR", "/tmp/pwl_env", 1);
    CHECK(resolve_out_dir(c, "") == "/tmp/pwl_env/demo");
    ::unsetenv("PWLOPT_OUTDIR");
    CHECK(resolve_out_dir(c, "") == "runs/demo");
}
