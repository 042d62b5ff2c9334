#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldbounds/bounds.hpp"
#include "ldbounds/errors.hpp"
#include "ldbounds/rates.hpp"

namespace ldb::cli {

namespace {

using json = nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void bad(const std::string& path, const std::string& msg) { throw ConfigError(path, msg); }

void only_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) bad(path.empty() ? "<root>" : path, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) bad(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) bad(path, "must be finite");
    return v;
}

std::uint64_t unsigned_int(const json& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
        bad(path, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) bad(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

bool is_builtin(const std::string& kind) {
    try {
        return family_kind_from_string(kind) != FamilyKind::custom;
    } catch (const std::exception&) {
        return false;
    }
}

double support_width(const DensityFamily& f) { return f.bounded() ? f.b() - f.a() : 1.0; }

void line_col(const std::string& s, std::size_t byte, std::size_t& line, std::size_t& col) {
    line = 1;
    col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < s.size(); ++i) {
        if (s[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// closed forms are stated for the regime's own g
bool natural_g(const RegimeInfo& info, const ScalingFunction& g) { return g.name() == info.g.name(); }

double finite_or_nan(const Extended& e) { return e.is_finite() ? e.value() : kNaN; }

MCParams mc_params(const ExperimentConfig& cfg) {
    MCParams mc;
    mc.n_grid = cfg.n_grid;
    mc.trials = cfg.trials;
    mc.seed = *cfg.seed;
    mc.model = tail_model_from_string(cfg.tail_model);
    mc.threads = cfg.threads;
    return mc;
}

std::vector<double> ladder_for(const ExperimentConfig& cfg, const DensityFamily& f) {
    return cfg.eps_ladder.empty() ? default_eps_ladder(support_width(f)) : cfg.eps_ladder;
}

std::vector<double> s_grid_for(const ExperimentConfig& cfg) {
    return cfg.s_grid.empty() ? default_s_grid() : cfg.s_grid;
}

}  // namespace

Format format_from_string(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw ConfigError("format", "expected csv or json, got '" + s + "'");
}

DensityFamily ExperimentConfig::make_density() const {
    try {
        if (is_builtin(family.kind)) return make_family(family.kind, family.params);
        return make_registered(family.kind, family.params);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("family", e.what());
    }
}

ScalingFunction ExperimentConfig::scaling(const DensityFamily& f) const {
    if (g_tag == "auto") return classify(f).g;
    try {
        return scaling_from_string(g_tag, g_kappa);
    } catch (const std::exception& e) {
        throw ConfigError("g_tag", e.what());
    }
}

ExperimentConfig parse_config(const std::string& src) {
    json j;
    try {
        j = json::parse(src);
    } catch (const json::parse_error& e) {
        std::size_t line = 0, col = 0;
        line_col(src, e.byte, line, col);
        std::string what = e.what();
        auto pos = what.find("syntax error");
        throw ConfigError("", "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                                  (pos == std::string::npos ? what : what.substr(pos)));
    }
    only_keys(j, "", {"version", "family", "estimators", "g_tag", "g_kappa", "eps_ladder", "s_grid", "eps",
                      "alpha2_ladder", "n_grid", "trials", "seed", "tail_model", "threads", "output", "format"});

    ExperimentConfig c;
    if (!j.contains("version")) bad("version", "required");
    c.version = static_cast<int>(unsigned_int(j["version"], "version"));
    if (c.version != 1) bad("version", "unsupported schema version " + std::to_string(c.version));

    if (!j.contains("family")) bad("family", "required");
    const json& fam = j["family"];
    only_keys(fam, "family", {"kind", "params", "theta"});
    if (!fam.contains("kind")) bad("family.kind", "required");
    c.family.kind = text(fam["kind"], "family.kind");
    if (fam.contains("params")) c.family.params = numbers(fam["params"], "family.params");
    if (fam.contains("theta")) c.family.theta = number(fam["theta"], "family.theta");
    if (!is_builtin(c.family.kind)) {
        auto names = registered_names();
        if (std::find(names.begin(), names.end(), c.family.kind) == names.end())
            bad("family.kind", "unknown family '" + c.family.kind + "'");
    }
    DensityFamily f = c.make_density();

    if (j.contains("g_tag")) c.g_tag = text(j["g_tag"], "g_tag");
    if (j.contains("g_kappa")) c.g_kappa = number(j["g_kappa"], "g_kappa");
    if (c.g_tag == "power" && !(c.g_kappa > 0.0)) bad("g_kappa", "power g needs g_kappa > 0");
    c.scaling(f);

    if (j.contains("eps_ladder")) {
        c.eps_ladder = numbers(j["eps_ladder"], "eps_ladder");
        if (c.eps_ladder.size() < 4) bad("eps_ladder", "needs at least 4 rungs");
        for (std::size_t i = 0; i < c.eps_ladder.size(); ++i) {
            if (!(c.eps_ladder[i] > 0.0)) bad("eps_ladder[" + std::to_string(i) + "]", "must be positive");
            if (i > 0 && !(c.eps_ladder[i] < c.eps_ladder[i - 1]))
                bad("eps_ladder[" + std::to_string(i) + "]", "rungs must decrease");
        }
    }
    if (j.contains("s_grid")) {
        c.s_grid = numbers(j["s_grid"], "s_grid");
        if (c.s_grid.empty()) bad("s_grid", "must not be empty");
        for (std::size_t i = 0; i < c.s_grid.size(); ++i) {
            if (!(c.s_grid[i] > 0.0 && c.s_grid[i] < 1.0)) bad("s_grid[" + std::to_string(i) + "]", "must lie in (0,1)");
            if (i > 0 && !(c.s_grid[i] > c.s_grid[i - 1])) bad("s_grid[" + std::to_string(i) + "]", "must increase");
        }
    }
    if (j.contains("eps")) {
        c.eps = number(j["eps"], "eps");
        if (!(c.eps > 0.0)) bad("eps", "must be positive");
    }
    if (j.contains("alpha2_ladder")) {
        c.alpha2_ladder = numbers(j["alpha2_ladder"], "alpha2_ladder");
        if (c.alpha2_ladder.size() < 2) bad("alpha2_ladder", "needs at least 2 rungs");
        for (std::size_t i = 0; i < c.alpha2_ladder.size(); ++i)
            if (!(c.alpha2_ladder[i] > 0.0)) bad("alpha2_ladder[" + std::to_string(i) + "]", "must be positive");
    }

    if (j.contains("estimators")) {
        const json& es = j["estimators"];
        if (!es.is_array()) bad("estimators", "expected an array");
        for (std::size_t i = 0; i < es.size(); ++i) {
            const std::string p = "estimators[" + std::to_string(i) + "]";
            only_keys(es[i], p, {"kind", "eps", "lambda"});
            if (!es[i].contains("kind")) bad(p + ".kind", "required");
            EstimatorSpec s;
            try {
                s.kind = estimator_kind_from_string(text(es[i]["kind"], p + ".kind"));
            } catch (const InvalidParameter& e) {
                bad(p + ".kind", e.what());
            }
            if (s.eps_dependent()) {
                if (!es[i].contains("eps")) bad(p + ".eps", "required for " + to_string(s.kind));
                s.eps = number(es[i]["eps"], p + ".eps");
            } else if (es[i].contains("eps")) {
                bad(p + ".eps", "not used by " + to_string(s.kind));
            }
            if (s.kind == EstimatorKind::convex_combo) {
                if (!es[i].contains("lambda")) bad(p + ".lambda", "required for convex_combo");
                s.lambda = number(es[i]["lambda"], p + ".lambda");
            } else if (es[i].contains("lambda")) {
                bad(p + ".lambda", "not used by " + to_string(s.kind));
            }
            try {
                validate(s, f);
            } catch (const std::invalid_argument& e) {
                bad(p, e.what());
            }
            c.estimators.push_back(s);
        }
    }

    if (j.contains("n_grid")) {
        const json& ng = j["n_grid"];
        if (!ng.is_array()) bad("n_grid", "expected an array of sample sizes");
        for (std::size_t i = 0; i < ng.size(); ++i) {
            const std::string p = "n_grid[" + std::to_string(i) + "]";
            std::uint64_t n = unsigned_int(ng[i], p);
            if (n < 1 || n > 1000000) bad(p, "sample size out of range");
            if (!c.n_grid.empty() && !(static_cast<int>(n) > c.n_grid.back())) bad(p, "sizes must increase");
            c.n_grid.push_back(static_cast<int>(n));
        }
    }
    if (j.contains("trials")) {
        c.trials = unsigned_int(j["trials"], "trials");
        if (c.trials < 10000) bad("trials", "must be at least 10000");
    }
    if (j.contains("seed")) c.seed = unsigned_int(j["seed"], "seed");
    if (j.contains("tail_model")) {
        c.tail_model = text(j["tail_model"], "tail_model");
        try {
            tail_model_from_string(c.tail_model);
        } catch (const std::exception& e) {
            bad("tail_model", e.what());
        }
    }
    if (j.contains("threads")) c.threads = static_cast<unsigned>(unsigned_int(j["threads"], "threads"));
    if (j.contains("output")) c.output = text(j["output"], "output");
    if (j.contains("format")) c.format = format_from_string(text(j["format"], "format"));
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string render(const Table& t, Format f) {
    std::ostringstream os;
    if (f == Format::csv) {
        for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
        os << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                os << (i ? "," : "");
                std::visit(
                    [&](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, double>) os << fmt(v);
                        else if constexpr (std::is_same_v<T, std::string>) os << csv_field(v);
                        else if constexpr (std::is_same_v<T, bool>) os << (v ? "true" : "false");
                        else os << v;
                    },
                    row[i]);
            }
            os << '\n';
        }
        return os.str();
    }
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json o;
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) {
                        // JSON has no inf; keep the same spelling as the CSV
                        if (std::isfinite(v)) o[t.columns[i]] = v;
                        else if (std::isnan(v)) o[t.columns[i]] = nullptr;
                        else o[t.columns[i]] = fmt(v);
                    } else {
                        o[t.columns[i]] = v;
                    }
                },
                row[i]);
        }
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

Table cmd_bounds(const ExperimentConfig& cfg) {
    DensityFamily f = cfg.make_density();
    RegimeInfo info = classify(f);
    ScalingFunction g = cfg.scaling(f);

    double a1c = kNaN, a2c = kNaN;
    bool coc = false;
    if (natural_g(info, g)) {
        BoundPair c = closed_form_bounds(info.regime, info.A1, info.A2, info.kappa, finite_or_nan(info.J));
        a1c = c.alpha1_bar;
        a2c = c.alpha2_bar;
        coc = c.coincide;
    }
    ScalingProfile prof = ladder_profile(f, cfg.family.theta, g, ladder_for(cfg, f), s_grid_for(cfg));
    BoundPair n = compute_bounds(prof);

    Table t;
    t.columns = {"family", "regime", "kappa", "A1", "A2", "fisher_J", "g", "alpha1_bar_closed",
                 "alpha1_bar_numeric", "alpha2_bar_closed", "alpha2_bar_numeric", "s_star_alpha1", "s_star_alpha2",
                 "coincide_closed", "coincide_numeric", "attainability_open", "isg_uncertainty_max",
                 "isg_last_rung_change_max"};
    t.rows.push_back({f.name(), to_string(info.regime), info.kappa, info.A1, info.A2, info.J.as_double(), g.name(),
                      a1c, n.alpha1_bar, a2c, n.alpha2_bar, n.s_star1, n.s_star2, coc, n.coincide,
                      n.attainability_open, prof.max_uncertainty, prof.uniformity});
    return t;
}

Table cmd_renyi_curve(const ExperimentConfig& cfg) {
    DensityFamily f = cfg.make_density();
    RegimeInfo info = classify(f);
    ScalingFunction g = cfg.scaling(f);
    const auto ladder = ladder_for(cfg, f);
    const bool closed = natural_g(info, g);

    Table t;
    t.columns = {"s", "eps", "renyi", "g_eps", "renyi_over_g", "isg_extrapolated", "isg_uncertainty", "isg_closed",
                 "last_rung_change"};
    for (double s : s_grid_for(cfg)) {
        LimitEstimate le = scaled_limit(f, cfg.family.theta, s, g, ladder);
        double ref = kNaN;
        if (closed) {
            try {
                ref = closed_form_isg(info.regime, info.A1, info.A2, info.kappa, s, finite_or_nan(info.J));
            } catch (const std::invalid_argument&) {
            }
        }
        const auto& r = le.ratios;
        double change = r.size() >= 2 ? std::abs(r[r.size() - 1] - r[r.size() - 2]) : kNaN;
        for (std::size_t k = 0; k < ladder.size(); ++k) {
            double ge = g(ladder[k]);
            t.rows.push_back({s, ladder[k], r[k] * ge, ge, r[k], le.value, le.uncertainty, ref, change});
        }
    }
    return t;
}

Table cmd_rates(const ExperimentConfig& cfg) {
    if (cfg.estimators.empty()) bad("estimators", "rates needs at least one estimator");
    if (!(cfg.eps > 0.0)) bad("eps", "rates needs eps > 0");
    if (cfg.n_grid.size() < 4) bad("n_grid", "rates needs at least 4 sample sizes");
    DensityFamily f = cfg.make_density();
    RegimeInfo info = classify(f);
    ScalingFunction g = cfg.scaling(f);
    MCParams mc = mc_params(cfg);

    BoundPair bp = natural_g(info, g)
                       ? closed_form_bounds(info.regime, info.A1, info.A2, info.kappa, finite_or_nan(info.J))
                       : compute_bounds(ladder_profile(f, cfg.family.theta, g, ladder_for(cfg, f), s_grid_for(cfg)));

    Table t;
    t.columns = {"estimator", "eps", "g", "n_max_used", "beta_plus_empirical", "beta_minus_empirical",
                 "beta_empirical", "beta_stderr", "tail_model_plus", "tail_model_minus", "beta_plus_analytic",
                 "beta_minus_analytic", "beta_analytic", "beta_over_g", "beta_over_g_stderr", "alpha2_estimate",
                 "alpha2_estimate_stderr", "alpha2_estimate_trend", "alpha1_bar", "alpha2_bar", "within_alpha1_bar"};
    for (const auto& spec : cfg.estimators) {
        TailRateEstimate e = mc_tail_rate(f, spec, cfg.family.theta, cfg.eps, mc);
        Extended ap, am;
        bool has_analytic = false;
        try {
            has_analytic = analytic_rates(f, spec, cfg.eps, ap, am);
        } catch (const std::exception&) {
            has_analytic = false;
        }
        const double ge = g(cfg.eps);
        const double scaled = e.beta.as_double() / ge;
        const double scaled_se = e.slope_stderr / ge;

        double a2 = kNaN, a2_se = kNaN, a2_trend = kNaN;
        if (!cfg.alpha2_ladder.empty()) {
            Alpha2Estimate est = alpha2_estimate(f, spec, cfg.family.theta, g, cfg.alpha2_ladder, mc);
            a2 = est.value;
            a2_se = est.ratio_stderr.empty() ? kNaN : est.ratio_stderr.back();
            a2_trend = est.trend;
        }
        // the observed rate, scaled, against the larger of the two bounds, with 3 sigma and 2% slack
        const double probe = std::isnan(a2) ? scaled : a2;
        const double probe_se = std::isnan(a2) ? scaled_se : a2_se;
        const bool within = probe <= bp.alpha1_bar * 1.02 + 3.0 * probe_se;

        t.rows.push_back({spec.name(), cfg.eps, g.name(), static_cast<long long>(e.n_grid.empty() ? 0 : e.n_grid.back()),
                          e.beta_plus.as_double(), e.beta_minus.as_double(), e.beta.as_double(), e.slope_stderr,
                          to_string(e.fit_plus.model), to_string(e.fit_minus.model),
                          has_analytic ? ap.as_double() : kNaN, has_analytic ? am.as_double() : kNaN,
                          has_analytic ? min(ap, am).as_double() : kNaN, scaled, scaled_se, a2, a2_se, a2_trend,
                          bp.alpha1_bar, bp.alpha2_bar, within});
    }
    return t;
}

Table cmd_verify(Level level, std::uint64_t seed, bool& all_pass) {
    Table t;
    t.columns = {"lemma", "pass", "slack", "detail"};
    all_pass = true;
    for (const auto& r : run_lemma_suite(level, seed)) {
        all_pass = all_pass && r.pass;
        t.rows.push_back({r.name, r.pass, r.slack, r.detail});
    }
    return t;
}

namespace {

void emit(const std::string& body, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << body;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("output", "cannot write '" + path + "'");
    out << body;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Large-deviation bounds for location-shift families"};
    app.require_subcommand(1);

    std::string config_path, out_path, format_name, level_name = "quick";
    std::optional<std::uint64_t> seed;

    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "experiment config (JSON)");
        if (needs_config) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "output file (default: stdout)");
        sub->add_option("--format", format_name, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", seed, "root seed, overrides the config");
    };
    auto* bounds = app.add_subcommand("bounds", "bound table for one family");
    auto* curve = app.add_subcommand("renyi-curve", "I^s along the eps ladder and its scaled limit");
    auto* rates = app.add_subcommand("rates", "simulated versus analytic tail rates");
    auto* verify = app.add_subcommand("verify", "run the lemma property suite");
    common(bounds, true);
    common(curve, true);
    common(rates, true);
    common(verify, false);
    verify->add_option("--level", level_name, "quick or full")->check(CLI::IsMember({"quick", "full"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) {
            std::uint64_t s = seed.value_or(20240601);
            Format fm = Format::csv;
            if (!config_path.empty()) {
                ExperimentConfig cfg = load_config(config_path);
                if (!seed && cfg.seed) s = *cfg.seed;
                fm = cfg.format;
                if (out_path.empty()) out_path = cfg.output;
            }
            if (!format_name.empty()) fm = format_from_string(format_name);
            bool ok = false;
            Table t = cmd_verify(level_from_string(level_name), s, ok);
            emit(render(t, fm), out_path);
            return ok ? 0 : 1;
        }

        ExperimentConfig cfg = load_config(config_path);
        if (seed) cfg.seed = seed;
        if (!cfg.seed) throw ConfigError("seed", "required (in the config or via --seed)");
        if (!format_name.empty()) cfg.format = format_from_string(format_name);
        if (!out_path.empty()) cfg.output = out_path;

        Table t;
        if (bounds->parsed()) t = cmd_bounds(cfg);
        else if (curve->parsed()) t = cmd_renyi_curve(cfg);
        else t = cmd_rates(cfg);
        emit(render(t, cfg.format), cfg.output);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace ldb::cli
