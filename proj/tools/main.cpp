#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pwlopt/adversary.hpp"
#include "pwlopt/dispersion.hpp"
#include "pwlopt/error.hpp"
#include "pwlopt/experiment.hpp"
#include "pwlopt/greedy.hpp"
#include "pwlopt/iqp.hpp"
#include "pwlopt/market.hpp"
#include "pwlopt/online.hpp"
#include "pwlopt/privacy.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) pwlopt::fail("IoError", "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
    const auto config = pwlopt::experiment::parse_config(read_file(config_path));
    const std::string out_dir = pwlopt::experiment::resolve_out_dir(config, out_override);
    const auto result = pwlopt::experiment::run_experiment(config, out_dir);
    std::cout << "wrote " << result.file_names.size() << " files to " << out_dir << "\n";
    std::cout << (result.all_checks_pass ? "all checks passed" : "some checks FAILED") << "\n";
    return result.all_checks_pass ? 0 : 1;
}

// Compact self-checks per subsystem; each suite prints pass/fail lines and
// the command exits 0 iff everything passed.
int cmd_verify(const std::string& suite) {
    using namespace pwlopt;
    int failures = 0;
    const auto report = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    const bool all = suite == "all";
    if (all || suite == "piecewise") {
        Rng rng(7);
        const auto f = piecewise::make_piecewise(
            0.0, 1.0, {0.5},
            {piecewise::Piece::constant(0.0, 0.5, 0.0), piecewise::Piece::constant(0.5, 1.0, 1.0)});
        report("piecewise.threshold_integral",
               std::abs(piecewise::exp_integral(f, 1.0, 0.0, 1.0) - 0.5 * (1.0 + std::exp(1.0))) <
                   1e-12);
        int right = 0;
        for (int i = 0; i < 20000; ++i) {
            if (piecewise::sample_exp(f, std::log(9.0), rng) >= 0.5) ++right;
        }
        report("piecewise.sampler_mass", std::abs(right / 20000.0 - 0.9) < 0.02);
    }
    if (all || suite == "dispersion") {
        Rng rng(11);
        bool ok = true;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> pts;
            for (int i = 0; i < 2500; ++i) pts.push_back(rng.uniform01());
            ok = ok && dispersion::kappa_check(pts, 1.0, 1.0 / std::sqrt(2500.0), 0.05).pass;
        }
        report("dispersion.kappa_concentration", ok);
    }
    if (all || suite == "privacy") {
        Rng rng(13);
        auto stream = adversary::adversary_smoothed("knapsack", 20, rng,
                                                    adversary::FamilyParams{6, 2.0, 5.0, 4.0});
        auto neighbor = stream.curves;
        Rng alt(14);
        neighbor.back() =
            adversary::adversary_smoothed("knapsack", 1, alt, adversary::FamilyParams{6, 2.0, 5.0, 4.0})
                .curves[0];
        neighbor.back().h_bound = stream.h_bound;
        for (auto& c : stream.curves) c.h_bound = stream.h_bound;
        const double ratio = privacy::privacy_ratio_check(stream.curves, neighbor, 0.5);
        report("privacy.ratio_within_epsilon", ratio <= 0.5 + 1e-9);
    }
    if (all || suite == "greedy") {
        Rng rng(21);
        bool curve_ok = true, knap_ok = true, mwis_ok = true;
        for (int t = 0; t < 40; ++t) {
            const auto inst = greedy::gen_knapsack_smoothed(8, 1.0, 5.0, rng);
            const auto curve = greedy::knapsack_curve(inst, 8.0);
            for (int g = 0; g < 200; ++g) {
                const double rho = 8.0 * (g + 0.5) / 200.0;
                curve_ok = curve_ok &&
                           piecewise::eval(curve.fn, rho) == greedy::knapsack_greedy(inst, rho).value;
            }
            knap_ok = knap_ok && greedy::knapsack_greedy(inst, 1.0).value >=
                                     0.5 * greedy::brute_force_knapsack(inst) - 1e-12;
            const auto graph = greedy::gen_mwis_smoothed(10, 1.0, 0.3, rng);
            mwis_ok = mwis_ok && greedy::mwis_greedy(graph, 1.0).value >=
                                     greedy::brute_force_mwis(graph) /
                                             std::max(graph.max_degree(), 1) -
                                         1e-12;
        }
        report("greedy.curve_equals_direct_run", curve_ok);
        report("greedy.knapsack_two_approximation", knap_ok);
        report("greedy.mwis_degree_ratio", mwis_ok);
    }
    if (all || suite == "iqp") {
        Rng rng(33);
        const auto inst = iqp::gen_maxcut(10, 0.5, rng);
        const auto emb = iqp::sdp_embed(inst, 6, 200, 1e-7, rng);
        double total = 0.0;
        const int draws = 200;
        for (int d = 0; d < draws; ++d) {
            std::vector<double> z(20);
            for (double& x : z) x = rng.normal();
            total += iqp::uowr_value(inst, emb, z, 0.0);
        }
        report("iqp.sign_rounding_vs_relaxation", total / draws >= 0.85 * emb.sdp_objective);

        std::vector<double> z2n(20);
        for (double& x : z2n) x = rng.normal();
        const std::vector<double> zn(z2n.begin(), z2n.begin() + 10);
        const auto bps = iqp::slin_breakpoints(emb, zn, 1e9);
        report("iqp.slin_gw_corner",
               !bps.empty() &&
                   iqp::uslin_value(inst, emb, zn, 0.5 * bps.front(), iqp::SlinMode::expected) ==
                       iqp::uowr_value(inst, emb, z2n, 0.0));
    }
    if (all || suite == "determinism") {
        const char* doc = R"({"pipeline":"online_full_info","family":"knapsack","T":30,
                              "seeds":[3,4],"n":6,"kappa":2.0,"B":5.0,"W":4.0})";
        const auto config = experiment::parse_config(doc);
        const auto a = experiment::run_experiment(config, "runs/_verify_a");
        const auto b = experiment::run_experiment(config, "runs/_verify_b");
        bool same = a.summary_json == b.summary_json && a.file_names == b.file_names;
        for (const auto& name : a.file_names) {
            same = same && read_file("runs/_verify_a/" + name) == read_file("runs/_verify_b/" + name);
        }
        report("determinism.byte_identical_rerun", same);
    }
    static const char* known_suites[] = {"all",     "piecewise", "dispersion", "privacy",
                                         "greedy",  "iqp",       "determinism"};
    const bool known = std::any_of(std::begin(known_suites), std::end(known_suites),
                                   [&](const char* s) { return suite == s; });
    if (!known) {
        pwlopt::fail("UnknownSuite",
                     "no such suite: " + suite +
                         " (piecewise|dispersion|privacy|greedy|iqp|determinism|all)");
    }
    return failures == 0 ? 0 : 1;
}

pwlopt::iqp::Embedding cached_embed(const pwlopt::iqp::IqpInstance& inst, int rank,
                                    std::uint64_t seed, const std::string& cache_dir,
                                    pwlopt::Rng& rng) {
    using namespace pwlopt;
    if (cache_dir.empty()) return iqp::sdp_embed(inst, rank, 300, 1e-7, rng);
    const auto path = std::filesystem::path(cache_dir) /
                      ("emb_" + iqp::embedding_cache_key(inst, rank, seed) + ".json");
    if (std::filesystem::exists(path)) return iqp::embedding_from_json(read_file(path.string()));
    const auto emb = iqp::sdp_embed(inst, rank, 300, 1e-7, rng);
    std::filesystem::create_directories(cache_dir);
    std::ofstream out(path, std::ios::binary);
    out << iqp::embedding_to_json(emb);
    return emb;
}

int cmd_extract_curve(const std::string& instance_path, const std::string& family, double B,
                      std::uint64_t seed, const std::string& out_path,
                      const std::string& emb_cache) {
    using namespace pwlopt;
    const json doc = json::parse(read_file(instance_path));
    piecewise::UtilityCurve curve;
    if (family == "knapsack") {
        greedy::KnapsackInstance inst;
        inst.values = doc.at("values").get<std::vector<double>>();
        inst.sizes = doc.at("sizes").get<std::vector<double>>();
        inst.capacity = doc.at("capacity").get<double>();
        curve = greedy::knapsack_curve(inst, B);
    } else if (family == "mwis") {
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : doc.at("adjacency")) edges.emplace_back(e.at(0), e.at(1));
        curve = greedy::mwis_curve(greedy::make_mwis(doc.at("values").get<std::vector<double>>(), edges), B);
    } else if (family == "owr") {
        const int n = doc.at("n").get<int>();
        std::vector<double> entries;
        for (const auto& row : doc.at("matrix")) {
            for (const auto& x : row) entries.push_back(x.get<double>());
        }
        const auto inst = iqp::make_iqp(n, std::move(entries));
        Rng rng(seed);
        const auto emb = cached_embed(inst, std::min(n, 8), seed, emb_cache, rng);
        std::vector<double> z(2 * n);
        for (double& x : z) x = rng.normal();
        for (int i = 0; i < n; ++i) {
            if (z[n + i] == 0.0) z[n + i] = 1e-12;
        }
        curve = iqp::owr_curve(inst, emb, z);
    } else if (family == "pricing_1d" || family == "second_price_1d") {
        market::ValuationProfile profile;
        profile.model = market::ValuationModel::additive;
        profile.n = doc.at("n").get<int>();
        profile.m = doc.at("m").get<int>();
        profile.W = doc.at("W").get<double>();
        profile.item_values = doc.at("values").get<std::vector<std::vector<double>>>();
        market::PriceAxis axis;
        axis.item = 0;
        axis.fixed_prices.assign(profile.m, 0.0);
        curve = market::curve_1d(profile,
                                 family == "pricing_1d" ? market::Mechanism::posted_price
                                                        : market::Mechanism::second_price,
                                 market::Objective::revenue, axis, profile.W);
    } else {
        fail("UnknownFamily", "no such family: " + family);
    }
    const std::string text = piecewise::to_json(curve.fn) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        out << text;
    }
    return 0;
}

int cmd_report(const std::string& run_dir) {
    const json summary = json::parse(read_file(run_dir + "/summary.json"));
    std::cout << "pipeline: " << summary.at("pipeline").get<std::string>() << "\n";
    std::cout << "family:   " << summary.value("family", std::string("-")) << "\n";
    std::cout << "T:        " << summary.value("T", 0) << "\n";
    if (summary.contains("median_regret")) {
        std::cout << "median regret: " << summary["median_regret"].get<double>() << "\n";
    }
    if (summary.contains("median_net_regret")) {
        std::cout << "median net regret: " << summary["median_net_regret"].get<double>() << "\n";
    }
    if (summary.contains("checks")) {
        for (const auto& [name, detail] : summary["checks"].items()) {
            std::cout << (detail.at("pass").get<bool>() ? "PASS " : "FAIL ") << name << "\n";
        }
    }
    const bool ok = summary.value("all_pass", false);
    std::cout << (ok ? "all checks passed" : "some checks FAILED") << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"piecewise-Lipschitz optimization toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    auto* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("config", config_path, "JSON config file")->required();
    run->add_option("--out", out_override, "output directory (overrides config and PWLOPT_OUTDIR)");

    std::string suite;
    auto* verify = app.add_subcommand("verify", "run a named verification suite");
    verify->add_option("suite", suite, "piecewise|dispersion|privacy|greedy|iqp|determinism|all")->required();

    std::string instance_path, family, curve_out, emb_cache;
    double B = 10.0;
    std::uint64_t seed = 0;
    auto* extract = app.add_subcommand("extract-curve", "utility curve of an instance file");
    extract->add_option("instance", instance_path, "instance JSON file")->required();
    extract->add_option("--family", family, "knapsack|mwis|owr|pricing_1d|second_price_1d")
        ->required();
    extract->add_option("--B", B, "parameter domain right end (greedy families)");
    extract->add_option("--seed", seed, "seed for embedding/Gaussian draws (owr)");
    extract->add_option("--emb-cache", emb_cache, "directory for cached SDP embeddings (owr)");
    extract->add_option("--out", curve_out, "write the curve JSON here instead of stdout");

    std::string run_dir;
    auto* report = app.add_subcommand("report", "summarize a finished run directory");
    report->add_option("run_dir", run_dir, "directory written by `run`")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(config_path, out_override);
        if (verify->parsed()) return cmd_verify(suite);
        if (extract->parsed()) {
            return cmd_extract_curve(instance_path, family, B, seed, curve_out, emb_cache);
        }
        if (report->parsed()) return cmd_report(run_dir);
    } catch (const pwlopt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
