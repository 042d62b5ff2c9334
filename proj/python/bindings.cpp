#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

#include "cli.hpp"
#include "ldbounds/bounds.hpp"
#include "ldbounds/errors.hpp"
#include "ldbounds/estimators.hpp"
#include "ldbounds/lemmas.hpp"
#include "ldbounds/rates.hpp"
#include "ldbounds/renyi.hpp"
#include "ldbounds/special.hpp"

namespace py = pybind11;
using namespace ldb;

namespace {

double ext(const Extended& e) { return e.as_double(); }

Regime regime_from_string(const std::string& s) {
    for (auto r : {Regime::regular, Regime::semi_regular, Regime::kappa_one, Regime::kappa_two, Regime::kappa_1_2,
                   Regime::kappa_0_1})
        if (to_string(r) == s) return r;
    throw InvalidParameter("unknown regime '" + s + "'");
}

EstimatorSpec estimator(const std::string& kind, double eps, double lambda) {
    EstimatorSpec s;
    s.kind = estimator_kind_from_string(kind);
    s.eps = eps;
    s.lambda = lambda;
    return s;
}

py::dict bound_dict(const BoundPair& b) {
    py::dict d;
    d["alpha1_bar"] = b.alpha1_bar;
    d["alpha2_bar"] = b.alpha2_bar;
    d["s_star1"] = b.s_star1;
    d["s_star2"] = b.s_star2;
    d["kappa"] = b.kappa;
    d["coincide"] = b.coincide;
    d["attainability_open"] = b.attainability_open;
    return d;
}

py::list table_rows(const cli::Table& t) {
    py::list rows;
    for (const auto& r : t.rows) {
        py::dict d;
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            std::visit([&](const auto& v) { d[py::str(t.columns[i])] = v; }, r[i]);
        rows.append(d);
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Large-deviation bounds for location-shift families";

    py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);
    py::register_exception<InsufficientEvents>(m, "InsufficientEvents", PyExc_RuntimeError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
    py::register_exception<UnsupportedFamily>(m, "UnsupportedFamily", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("solve_t0", &solve_t0);
    m.def("t0_residual", &t0_residual, py::arg("t"));
    m.def("log_gamma", &log_gamma, py::arg("x"));
    m.def("digamma", &digamma, py::arg("x"));
    m.def("beta_fn", &beta_fn, py::arg("x"), py::arg("y"));

    py::class_<DensityFamily>(m, "DensityFamily")
        .def_property_readonly("name", &DensityFamily::name)
        .def_property_readonly("kind", [](const DensityFamily& f) { return to_string(f.kind()); })
        .def_property_readonly("params", &DensityFamily::params)
        .def_property_readonly("support", [](const DensityFamily& f) { return std::make_pair(f.a(), f.b()); })
        .def_property_readonly("log_concave", &DensityFamily::log_concave)
        .def("log_density", &DensityFamily::log_density, py::arg("theta"), py::arg("x"))
        .def("cdf", &DensityFamily::cdf, py::arg("theta"), py::arg("x"))
        .def("sample", [](const DensityFamily& f, double theta, std::size_t n,
                          std::uint64_t seed) { return f.sample(theta, n, seed).values; },
             py::arg("theta"), py::arg("n"), py::arg("seed"))
        .def("__repr__", [](const DensityFamily& f) { return "<DensityFamily " + f.name() + ">"; });

    m.def("make_family", py::overload_cast<const std::string&, std::vector<double>>(&make_family), py::arg("kind"),
          py::arg("params") = std::vector<double>{});
    m.def("make_registered", &make_registered, py::arg("name"), py::arg("params"));
    m.def("fisher_information", [](const DensityFamily& f) { return ext(fisher_information(f)); });

    m.def("classify", [](const DensityFamily& f) {
        RegimeInfo r = classify(f);
        py::dict d;
        d["regime"] = to_string(r.regime);
        d["kappa"] = r.kappa;
        d["A1"] = r.A1;
        d["A2"] = r.A2;
        d["J"] = ext(r.J);
        d["g"] = r.g.name();
        return d;
    });

    m.def("renyi_divergence",
          [](const DensityFamily& f, double theta_p, double theta_q, double s) {
              return ext(renyi_divergence(f, theta_p, theta_q, s));
          },
          py::arg("family"), py::arg("theta_p"), py::arg("theta_q"), py::arg("s"));
    m.def("scaled_limit",
          [](const DensityFamily& f, double s, const std::string& g, double g_kappa, double theta) {
              ScalingFunction sf = g == "auto" ? classify(f).g : scaling_from_string(g, g_kappa);
              auto e = scaled_limit(f, theta, s, sf, default_eps_ladder(f.bounded() ? f.b() - f.a() : 1.0));
              return py::make_tuple(e.value, e.uncertainty);
          },
          py::arg("family"), py::arg("s"), py::arg("g") = "auto", py::arg("g_kappa") = 0.0, py::arg("theta") = 0.0);
    m.def("closed_form_isg",
          [](const std::string& regime, double A1, double A2, double kappa, double s, double J) {
              return closed_form_isg(regime_from_string(regime), A1, A2, kappa, s, J);
          },
          py::arg("regime"), py::arg("A1"), py::arg("A2"), py::arg("kappa"), py::arg("s"),
          py::arg("J") = std::numeric_limits<double>::quiet_NaN());

    m.def("closed_form_bounds",
          [](const std::string& regime, double A1, double A2, double kappa, double J) {
              return bound_dict(closed_form_bounds(regime_from_string(regime), A1, A2, kappa, J));
          },
          py::arg("regime"), py::arg("A1") = 0.0, py::arg("A2") = 0.0, py::arg("kappa") = 2.0,
          py::arg("J") = std::numeric_limits<double>::quiet_NaN());
    m.def("ladder_bounds",
          [](const DensityFamily& f, const std::string& g, double g_kappa) {
              ScalingFunction sf = g == "auto" ? classify(f).g : scaling_from_string(g, g_kappa);
              const double w = f.bounded() ? f.b() - f.a() : 1.0;
              return bound_dict(compute_bounds(ladder_profile(f, 0.0, sf, default_eps_ladder(w))));
          },
          py::arg("family"), py::arg("g") = "auto", py::arg("g_kappa") = 0.0);

    m.def("estimate",
          [](const DensityFamily& f, const std::string& kind, const std::vector<double>& x, double eps, double lambda) {
              return estimate(estimator(kind, eps, lambda), f, x);
          },
          py::arg("family"), py::arg("estimator"), py::arg("x"), py::arg("eps") = 0.0, py::arg("lambda_") = 0.5);

    m.def("mc_tail_rate",
          [](const DensityFamily& f, const std::string& kind, double eps, std::vector<int> n_grid, std::uint64_t trials,
             std::uint64_t seed, double theta, double estimator_eps, double lambda, unsigned threads) {
              MCParams mc;
              mc.n_grid = std::move(n_grid);
              mc.trials = trials;
              mc.seed = seed;
              mc.threads = threads;
              TailRateEstimate r;
              {
                  py::gil_scoped_release nogil;
                  r = mc_tail_rate(f, estimator(kind, estimator_eps, lambda), theta, eps, mc);
              }
              py::dict d;
              d["beta_plus"] = ext(r.beta_plus);
              d["beta_minus"] = ext(r.beta_minus);
              d["beta"] = ext(r.beta);
              d["stderr"] = r.slope_stderr;
              d["n_grid"] = r.n_grid;
              d["p_plus"] = r.p_plus;
              d["p_minus"] = r.p_minus;
              return d;
          },
          py::arg("family"), py::arg("estimator"), py::arg("eps"), py::arg("n_grid"), py::arg("trials") = 100000,
          py::arg("seed") = 1, py::arg("theta") = 0.0, py::arg("estimator_eps") = 0.0, py::arg("lambda_") = 0.5,
          py::arg("threads") = 0);

    m.def("chernoff_test_rate",
          [](const DensityFamily& f, double theta_p, double theta_q) {
              return ext(chernoff_test_rate({f, theta_p}, {f, theta_q}).value);
          },
          py::arg("family"), py::arg("theta_p"), py::arg("theta_q"));
    m.def("hoeffding_rate",
          [](const DensityFamily& f, double theta_p, double theta_q, double r) {
              return ext(hoeffding_rate({f, theta_p}, {f, theta_q}, r).value);
          },
          py::arg("family"), py::arg("theta_p"), py::arg("theta_q"), py::arg("r"));

    m.def("lemma_suite",
          [](const std::string& level, std::uint64_t seed) {
              py::list out;
              for (const auto& r : run_lemma_suite(level_from_string(level), seed)) {
                  py::dict d;
                  d["lemma"] = r.name;
                  d["pass"] = r.pass;
                  d["slack"] = r.slack;
                  d["detail"] = r.detail;
                  out.append(d);
              }
              return out;
          },
          py::arg("level") = "quick", py::arg("seed") = 20240601);

    // the CLI tables, driven by the same JSON config
    m.def("run_config",
          [](const std::string& command, const std::string& config_json) {
              cli::ExperimentConfig cfg = cli::parse_config(config_json);
              if (!cfg.seed) throw ConfigError("seed", "required");
              if (command == "bounds") return table_rows(cli::cmd_bounds(cfg));
              if (command == "renyi-curve") return table_rows(cli::cmd_renyi_curve(cfg));
              if (command == "rates") return table_rows(cli::cmd_rates(cfg));
              throw InvalidParameter("unknown command '" + command + "'");
          },
          py::arg("command"), py::arg("config_json"));
}
