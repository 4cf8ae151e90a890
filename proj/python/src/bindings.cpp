#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pwlopt/adversary.hpp"
#include "pwlopt/dispersion.hpp"
#include "pwlopt/greedy.hpp"
#include "pwlopt/iqp.hpp"
#include "pwlopt/market.hpp"
#include "pwlopt/online.hpp"
#include "pwlopt/privacy.hpp"
#include "pwlopt/rademacher.hpp"

namespace py = pybind11;
using namespace pwlopt;

namespace {

piecewise::PiecewiseFn1D fn_from_parts(double lo, double hi, const std::vector<double>& bps,
                                       const std::vector<py::dict>& parts) {
    std::vector<piecewise::Piece> pieces;
    for (const auto& d : parts) {
        const double plo = d["lo"].cast<double>();
        const double phi = d["hi"].cast<double>();
        if (d.contains("value")) {
            pieces.push_back(piecewise::Piece::constant(plo, phi, d["value"].cast<double>()));
        } else {
            pieces.push_back(piecewise::Piece::affine(plo, phi, d["slope"].cast<double>(),
                                                      d["intercept"].cast<double>()));
        }
    }
    return piecewise::make_piecewise(lo, hi, bps, pieces);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "piecewise-Lipschitz optimization toolkit";

    py::register_exception<Error>(m, "PwloptError");

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>())
        .def("uniform01", &Rng::uniform01)
        .def("normal", &Rng::normal)
        .def("fork", &Rng::fork);

    py::class_<piecewise::PiecewiseFn1D>(m, "PiecewiseFn1D")
        .def_readonly("lo", &piecewise::PiecewiseFn1D::lo)
        .def_readonly("hi", &piecewise::PiecewiseFn1D::hi)
        .def_readonly("breakpoints", &piecewise::PiecewiseFn1D::breakpoints)
        .def("__call__", [](const piecewise::PiecewiseFn1D& f, double x) { return piecewise::eval(f, x); })
        .def("to_json", [](const piecewise::PiecewiseFn1D& f) { return piecewise::to_json(f); });

    py::class_<piecewise::UtilityCurve>(m, "UtilityCurve")
        .def_readonly("fn", &piecewise::UtilityCurve::fn)
        .def_readonly("h_bound", &piecewise::UtilityCurve::h_bound)
        .def_readonly("instance_tag", &piecewise::UtilityCurve::instance_tag);

    m.def("make_piecewise", &fn_from_parts, py::arg("lo"), py::arg("hi"), py::arg("breakpoints"),
          py::arg("pieces"),
          "pieces: dicts with lo/hi and either value or slope+intercept");
    m.def("fn_from_json", &piecewise::from_json);
    m.def("eval_fn", &piecewise::eval);
    m.def("sum_fns",
          [](const std::vector<piecewise::PiecewiseFn1D>& fns, double lo, double hi) {
              return piecewise::sum(fns, lo, hi);
          });
    m.def("argmax_fn", [](const piecewise::PiecewiseFn1D& f) {
        const auto r = piecewise::argmax(f);
        return py::make_tuple(r.rho, r.value);
    });
    m.def("exp_integral", &piecewise::exp_integral);
    m.def("sample_exp",
          [](const piecewise::PiecewiseFn1D& f, double lam, Rng& rng) {
              return piecewise::sample_exp(f, lam, rng);
          });

    // dispersion
    m.def("max_interval_count", &dispersion::max_interval_count);
    m.def("dispersion_at", &dispersion::dispersion_at);
    m.def("empirical_profile", [](const std::vector<piecewise::UtilityCurve>& curves,
                                  std::vector<double> ws) {
        const auto p = dispersion::empirical_profile(curves, std::move(ws));
        return py::make_tuple(p.ws, p.ks);
    });
    m.def("kappa_check", [](const std::vector<double>& samples, double kappa, double w, double zeta) {
        const auto r = dispersion::kappa_check(samples, kappa, w, zeta);
        return py::make_tuple(r.observed_k, r.bound_k, r.pass);
    });

    // online
    m.def("lambda_full_info", &online::lambda_full_info);
    m.def("lambda_private", &online::lambda_private);
    m.def("build_net", &online::build_net, py::arg("box"), py::arg("w"),
          py::arg("max_points") = 1000000);
    py::class_<online::EwfLearner>(m, "EwfLearner")
        .def(py::init([](double lo, double hi, double lambda, double h_bound, std::uint64_t seed) {
                 return online::EwfLearner(lo, hi, lambda, h_bound, Rng(seed));
             }),
             py::arg("lo"), py::arg("hi"), py::arg("lambda"), py::arg("h_bound"), py::arg("seed"))
        .def("play", &online::EwfLearner::play)
        .def("update", &online::EwfLearner::update)
        .def_property_readonly("round", &online::EwfLearner::round);
    py::class_<online::Exp3Bandit>(m, "Exp3Bandit")
        .def(py::init([](std::vector<double> arms, int T, double h_bound, std::uint64_t seed) {
                 return online::Exp3Bandit::with_horizon(std::move(arms), T, h_bound, Rng(seed));
             }),
             py::arg("arms"), py::arg("T"), py::arg("h_bound"), py::arg("seed"))
        .def("play_round", [](online::Exp3Bandit& b, const std::function<double(double)>& payoff) {
            const auto r = b.play_round(payoff);
            return py::make_tuple(r.arm_index, r.arm, r.payoff);
        });
    m.def("compute_regret", [](const std::vector<piecewise::UtilityCurve>& curves,
                               const std::vector<double>& plays) {
        const auto ledger = online::compute_regret(curves, plays);
        py::dict d;
        d["opt"] = ledger.opt;
        d["opt_rho"] = ledger.opt_rho;
        d["regret"] = ledger.regret;
        d["realized"] = ledger.realized;
        return d;
    });

    // privacy
    m.def("exp_mech_1d", [](const std::vector<piecewise::UtilityCurve>& curves, double eps,
                            double h_bound, Rng& rng) {
        return privacy::exp_mech_1d(curves, eps, h_bound, rng);
    });
    m.def("exp_mech_grid", [](const std::vector<double>& utils, double eps, double h_bound, int n,
                              Rng& rng) { return privacy::exp_mech_grid(utils, eps, h_bound, n, rng); });
    m.def("utility_bound", &privacy::utility_bound);
    m.def("privacy_ratio_check", &privacy::privacy_ratio_check);

    // greedy families
    py::class_<greedy::KnapsackInstance>(m, "KnapsackInstance")
        .def(py::init([](std::vector<double> values, std::vector<double> sizes, double capacity) {
                 return greedy::KnapsackInstance{std::move(values), std::move(sizes), capacity};
             }),
             py::arg("values"), py::arg("sizes"), py::arg("capacity"))
        .def_readonly("values", &greedy::KnapsackInstance::values)
        .def_readonly("sizes", &greedy::KnapsackInstance::sizes)
        .def_readonly("capacity", &greedy::KnapsackInstance::capacity);
    m.def("knapsack_greedy", [](const greedy::KnapsackInstance& inst, double rho) {
        const auto r = greedy::knapsack_greedy(inst, rho);
        return py::make_tuple(r.selected, r.value);
    });
    m.def("knapsack_curve", &greedy::knapsack_curve);
    m.def("brute_force_knapsack", &greedy::brute_force_knapsack);
    m.def("make_mwis", &greedy::make_mwis);
    m.def("mwis_greedy", [](const greedy::MwisInstance& inst, double rho) {
        const auto r = greedy::mwis_greedy(inst, rho);
        return py::make_tuple(r.selected, r.value);
    });
    py::class_<greedy::MwisInstance>(m, "MwisInstance");
    m.def("mwis_curve", [](const greedy::MwisInstance& inst, double B) {
        return greedy::mwis_curve(inst, B);
    });
    m.def("brute_force_mwis", &greedy::brute_force_mwis);

    // iqp
    py::class_<iqp::IqpInstance>(m, "IqpInstance").def_readonly("n", &iqp::IqpInstance::n);
    py::class_<iqp::Embedding>(m, "Embedding")
        .def_readonly("sdp_objective", &iqp::Embedding::sdp_objective);
    m.def("make_iqp", &iqp::make_iqp);
    m.def("gen_maxcut", &iqp::gen_maxcut);
    m.def("sdp_embed", &iqp::sdp_embed);
    m.def("uowr_value", &iqp::uowr_value);
    m.def("owr_curve", &iqp::owr_curve);
    m.def("slin_search_bound", &iqp::slin_search_bound);
    m.def("brute_force_iqp", &iqp::brute_force_iqp);

    // market
    py::class_<market::ValuationProfile>(m, "ValuationProfile")
        .def_readonly("n", &market::ValuationProfile::n)
        .def_readonly("m", &market::ValuationProfile::m)
        .def_readonly("item_values", &market::ValuationProfile::item_values);
    m.def("gen_valuations", [](const std::string& model, int n, int m, double kappa, double W,
                               Rng& rng) {
        const auto mm = model == "additive"      ? market::ValuationModel::additive
                        : model == "unit_demand" ? market::ValuationModel::unit_demand
                                                 : market::ValuationModel::general;
        return market::gen_valuations(mm, n, m, kappa, W, rng);
    });
    m.def("posted_price_run", [](const market::ValuationProfile& p, const std::vector<double>& prices) {
        const auto out = market::posted_price_run(p, prices);
        py::dict d;
        d["revenue"] = out.revenue;
        d["welfare"] = out.welfare;
        d["item_owner"] = out.item_owner;
        return d;
    });
    m.def("second_price_run", [](const market::ValuationProfile& p, const std::vector<double>& res) {
        const auto out = market::second_price_run(p, res);
        py::dict d;
        d["revenue"] = out.revenue;
        d["welfare"] = out.welfare;
        d["item_owner"] = out.item_owner;
        return d;
    });

    // rademacher
    m.def("empirical_rademacher", [](const std::vector<piecewise::UtilityCurve>& curves, int n_sigma,
                                     Rng& rng) {
        const auto est = rademacher::empirical_rademacher(curves, n_sigma, rng);
        return py::make_tuple(est.mean, est.std_error);
    });
    m.def("rademacher_bound", [](int d, double R, double w, double L, double k, int N) {
        return rademacher::rademacher_bound(d, R, w, L, k, N);
    });

    // adversaries
    m.def("adversary_smoothed", [](const std::string& family, int T, std::uint64_t seed, int n,
                                   double kappa, double B, double W) {
        Rng rng(seed);
        adversary::FamilyParams params;
        params.n = n;
        params.kappa = kappa;
        params.B = B;
        params.W = W;
        const auto s = adversary::adversary_smoothed(family, T, rng, params);
        return py::make_tuple(s.curves, s.h_bound, s.domain_lo, s.domain_hi);
    });
    m.def("adversary_weed", [](int T, std::uint64_t seed, bool upper) {
        Rng rng(seed);
        const auto s = adversary::adversary_weed(
            T, rng, upper ? adversary::WeedSide::upper : adversary::WeedSide::lower);
        return py::make_tuple(s.curves, s.h_bound);
    });
}
