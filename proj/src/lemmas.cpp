#include "ldbounds/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "ldbounds/errors.hpp"
#include "ldbounds/families.hpp"
#include "ldbounds/quadrature.hpp"
#include "ldbounds/rates.hpp"
#include "ldbounds/renyi.hpp"
#include "ldbounds/special.hpp"

namespace ldb {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

// e^{-u}(1+u) - 1 (sign = -1) or e^{u}(1-u) - 1 (sign = +1) without cancellation
double edge_term(double u, int sign) {
    if (u < 0.1) {
        double acc = 0.0, pw = u * u, fact = 2.0;
        for (int k = 2; k < 20; ++k) {
            double c = (1.0 - k) * pw / fact;
            acc += (sign < 0 && (k & 1)) ? -c : c;
            pw *= u;
            fact *= k + 1;
        }
        return acc;
    }
    return sign < 0 ? std::exp(-u) * (1.0 + u) - 1.0 : std::exp(u) * (1.0 - u) - 1.0;
}

std::vector<double> geometric_breaks(double lo, double eps, double delta) {
    std::vector<double> br{lo};
    for (double x = eps; x < delta; x *= 4.0)
        if (x > lo) br.push_back(x);
    br.push_back(delta);
    return br;
}

LemmaResult make(std::string name, double slack, std::string detail) {
    return {std::move(name), slack >= 0.0, slack, std::move(detail)};
}

}  // namespace

Level level_from_string(const std::string& s) {
    if (s == "quick") return Level::quick;
    if (s == "full") return Level::full;
    throw InvalidParameter("unknown level '" + s + "' (expected quick or full)");
}

std::pair<double, double> l11_integrals(double eps, double delta) {
    if (!(eps > 0.0 && eps < delta)) throw InvalidParameter("l11_integrals: need 0 < eps < delta");
    QuadOptions opt;
    opt.rel_tol = 1e-13;
    auto f1 = [eps](double x) { return x > 0.0 ? x * edge_term(eps / x, -1) : 0.0; };
    auto f2 = [eps](double x) { return x * edge_term(eps / x, 1); };
    double i1 = integrate(f1, geometric_breaks(0.0, eps, delta), opt).value;
    double i2 = integrate(f2, geometric_breaks(eps, eps, delta), opt).value;
    return {i1, i2};
}

std::pair<double, double> l11_ratios(double eps, double delta) {
    auto [i1, i2] = l11_integrals(eps, delta);
    const double d = eps * eps * std::log(eps);
    return {i1 / d, i2 / d};
}

std::pair<double, double> l11_extrapolated(const std::vector<double>& eps, double delta) {
    if (eps.size() != 3) throw InvalidParameter("l11_extrapolated: needs three eps values");
    double r1[3], r2[3], u[3];
    for (int i = 0; i < 3; ++i) {
        std::tie(r1[i], r2[i]) = l11_ratios(eps[i], delta);
        u[i] = 1.0 / std::log(eps[i]);
    }
    // exact quadratic in u through the three points, evaluated at u = 0
    auto at0 = [&](const double* r) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) {
            double w = 1.0;
            for (int j = 0; j < 3; ++j)
                if (j != i) w *= (0.0 - u[j]) / (u[i] - u[j]);
            acc += w * r[i];
        }
        return acc;
    };
    return {at0(r1), at0(r2)};
}

double ConcavePL::operator()(double t) const {
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < slope.size(); ++i) v = std::min(v, intercept[i] + slope[i] * t);
    return v;
}

std::vector<double> ConcavePL::knots() const {
    std::vector<double> k;
    for (std::size_t i = 0; i < slope.size(); ++i)
        for (std::size_t j = i + 1; j < slope.size(); ++j) {
            if (slope[i] == slope[j]) continue;
            double t = (intercept[j] - intercept[i]) / (slope[i] - slope[j]);
            if (t > 0.0 && t < 1.0) k.push_back(t);
        }
    std::sort(k.begin(), k.end());
    return k;
}

ConcavePL random_concave(std::uint64_t seed, int pieces) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ConcavePL f;
    for (int i = 0; i < pieces; ++i) {
        // affine pieces nonnegative at both ends keep the minimum >= 0 on [0,1]
        double v0 = 2.0 * u(rng), v1 = 2.0 * u(rng);
        f.intercept.push_back(v0);
        f.slope.push_back(v1 - v0);
    }
    return f;
}

double inf_sup_brute(const ConcavePL& f, double s, int x_grid, int t_grid) {
    std::vector<double> ts;
    for (int i = 1; i < t_grid; ++i) ts.push_back(static_cast<double>(i) / t_grid);
    for (double k : f.knots()) ts.push_back(k);
    ts.push_back(s);
    std::vector<double> ft;
    for (double t : ts) ft.push_back(f(t));
    auto sup_t = [&](double x) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ts.size(); ++i)
            best = std::max(best, ((s - ts[i]) * x + (1.0 - s) * ft[i]) / (1.0 - ts[i]));
        return best;
    };
    double xmax = 1.0;
    for (std::size_t i = 0; i < f.slope.size(); ++i) xmax = std::max(xmax, std::abs(f.intercept[i]) + std::abs(f.slope[i]));
    xmax *= 2.0;
    double best = std::numeric_limits<double>::infinity();
    int bi = 0;
    for (int i = 0; i <= x_grid; ++i) {
        double v = sup_t(xmax * i / x_grid);
        if (v < best) best = v, bi = i;
    }
    // sup over t of affine functions of x is convex in x
    double lo = xmax * std::max(0, bi - 1) / x_grid, hi = xmax * std::min(x_grid, bi + 1) / x_grid;
    for (int it = 0; it < 100; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (sup_t(m1) <= sup_t(m2))
            hi = m2;
        else
            lo = m1;
    }
    return std::min(best, sup_t(0.5 * (lo + hi)));
}

LemmaResult check_sandwich(int cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double tol = 1e-9;
    double worst = std::numeric_limits<double>::infinity();
    int violations = 0;
    for (int c = 0; c < cases; ++c) {
        DensityFamily f = make_family(FamilyKind::gaussian, {1.0});
        switch (c % 6) {
            case 0: f = make_family(FamilyKind::gaussian, {0.5 + 1.5 * u(rng)}); break;
            case 1: f = make_family(FamilyKind::beta, {1.2 + 3.0 * u(rng), 1.2 + 3.0 * u(rng)}); break;
            case 2: f = make_family(FamilyKind::gamma, {1.2 + 3.0 * u(rng), 1.0}); break;
            case 3: f = make_family(FamilyKind::weibull, {1.0 + 2.0 * u(rng), 1.0}); break;
            case 4: f = make_family(FamilyKind::uniform, {0.0, 1.0}); break;
            case 5: f = make_family(FamilyKind::triangular, {0.1 + 0.8 * u(rng)}); break;
        }
        const double shift = 0.02 + 0.6 * u(rng);
        FamilyPoint p{f, 0.0}, q{f, shift};
        const double half = renyi_divergence(p, q, 0.5).value();
        for (int k = 0; k < 20; ++k) {
            const double s = 0.01 + 0.98 * u(rng);
            const double I = renyi_divergence(p, q, s).value();
            const double lo = 2.0 * std::min(s, 1.0 - s) * half, hi = 2.0 * std::max(s, 1.0 - s) * half;
            const double slack = std::min(I - lo, hi - I) + tol;
            worst = std::min(worst, slack);
            if (slack < 0.0) ++violations;
        }
    }
    return make("sandwich", violations ? -1.0 : worst,
                std::to_string(cases) + " pairs x 20 s, violations " + std::to_string(violations));
}

LemmaResult check_l8() {
    const double h = 1e-4, tol = 1e-6;
    double worst = 0.0;
    std::string detail;
    for (double k : {1.2, 1.5, 1.8}) {
        auto F = [k](double s) { return s * (1.0 - s * (k - 1.0)) * beta_fn(s + k * (1.0 - s), 2.0 - k); };
        double fd = (F(0.5 + h) - F(0.5 - h)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - l8_derivative(k, L8Branch::kappa_1_2)));
    }
    for (double k : {0.2, 0.5, 0.8}) {
        auto F = [k](double s) { return s * beta_fn(s + k * (1.0 - s), 1.0 - k); };
        double fd = (F(0.5 + h) - F(0.5 - h)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - l8_derivative(k, L8Branch::kappa_0_1)));
    }
    return make("l8_derivatives", tol - worst, "max |closed - central difference| = " + fmt(worst));
}

LemmaResult check_l11_literal(double eps) {
    auto [r1, r2] = l11_ratios(eps);
    const double dev = std::max(std::abs(r1 - 0.5), std::abs(r2 - 0.5)) / 0.5;
    return make("l11_ratios_at_eps", 0.02 - dev,
                "eps=" + fmt(eps) + " ratios " + fmt(r1) + ", " + fmt(r2) + " (tends to 1/2 like 1/log eps)");
}

LemmaResult check_l11_limit() {
    auto [l1, l2] = l11_extrapolated();
    auto [r1, r2] = l11_ratios(1e-4);
    const double dev = std::max(std::abs(l1 - 0.5), std::abs(l2 - 0.5)) / 0.5;
    return make("l11_limit", 0.02 - dev,
                "extrapolated " + fmt(l1) + ", " + fmt(l2) + "; raw at 1e-4: " + fmt(r1) + ", " + fmt(r2));
}

LemmaResult check_l12() {
    double prev = t0_residual(0.0), min_step = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 100; ++i) {
        double v = t0_residual(0.5 * i / 100.0);
        min_step = std::min(min_step, v - prev);
        prev = v;
    }
    const double t0 = solve_t0();
    const double res = std::abs(t0_residual(t0));
    const double slack = std::min(min_step, 1e-12 - res);
    return make("l12_t0", slack, "t0=" + fmt(t0) + " residual " + fmt(res) + ", smallest increment " + fmt(min_step));
}

LemmaResult check_l13() {
    double worst = 0.0;
    std::string detail;
    for (double k : {1.2, 1.5, 1.8}) {
        double best = std::numeric_limits<double>::infinity(), arg = 0.0;
        for (int i = 1; i < 10000; ++i) {
            double s = i / 10000.0;
            double v = l13_objective(k, s);
            if (v < best) best = v, arg = s;
        }
        worst = std::max(worst, std::abs(arg - 0.5));
        detail += "k=" + fmt(k) + ":" + fmt(arg) + " ";
    }
    return make("l13_minimizer", 1e-3 - worst, "argmin " + detail);
}

LemmaResult check_inf_sup(int functions, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    double worst = 0.0;
    for (int i = 0; i < functions; ++i) {
        auto f = random_concave(rng(), 2 + i % 4);
        for (int k = 0; k < 10; ++k) {
            double s = u(rng);
            worst = std::max(worst, std::abs(inf_sup_brute(f, s) - f(s)));
        }
    }
    return make("concave_inf_sup", 1e-6 - worst,
                std::to_string(functions) + " functions x 10 s, max |inf sup - f(s)| = " + fmt(worst));
}

LemmaResult check_kappa_of_g() {
    double worst = 0.0;
    auto chk = [&](const ScalingFunction& g, double k) { worst = std::max(worst, std::abs(kappa_of_g(g) - k)); };
    chk(ScalingFunction::square(), 2.0);
    chk(ScalingFunction::abs(), 1.0);
    chk(ScalingFunction::sq_log(), 2.0);
    chk(ScalingFunction::power(0.7), 0.7);
    chk(ScalingFunction::custom([](double e) { return std::pow(e, 1.5) * (1.0 + e); }), 1.5);
    return make("kappa_of_g", 1e-3 - worst, "max |kappa - exponent| = " + fmt(worst));
}

std::vector<LemmaResult> run_lemma_suite(Level level, std::uint64_t seed) {
    const bool full = level == Level::full;
    std::vector<LemmaResult> out;
    auto guarded = [&](const std::string& name, const std::function<LemmaResult()>& fn) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, false, -1.0, std::string("error: ") + e.what()});
        }
    };
    guarded("sandwich", [&] { return check_sandwich(full ? 200 : 30, seed); });
    guarded("l8_derivatives", [] { return check_l8(); });
    guarded("l11_limit", [] { return check_l11_limit(); });
    guarded("l12_t0", [] { return check_l12(); });
    guarded("l13_minimizer", [] { return check_l13(); });
    guarded("concave_inf_sup", [&] { return check_inf_sup(full ? 10 : 3, seed + 1); });
    guarded("kappa_of_g", [] { return check_kappa_of_g(); });
    if (!full) return out;

    MCParams mc;
    mc.trials = 100000;
    mc.seed = seed;
    guarded("chernoff_gaussian_mc", [&] {
        MCParams m = mc;
        m.n_grid = {4, 8, 12, 16, 24, 32, 40, 48, 56, 64, 80, 96};
        auto g = make_family(FamilyKind::gaussian, {1.0});
        auto r = ht_simulate({g, 0.0}, {g, 1.0}, m);
        double dev = std::abs(r.slope - 0.125) / 0.125;
        return make("chernoff_gaussian_mc", 0.1 - dev, "slope " + fmt(r.slope) + " vs 0.125");
    });
    guarded("lr_identity_gaussian", [&] {
        MCParams m = mc;
        m.n_grid = {10, 20, 40, 60, 80, 120, 160, 200, 240, 280, 320};
        auto g = make_family(FamilyKind::gaussian, {1.0});
        auto r = lr_rate_identity(g, 0.0, 0.25, m);
        double dev = std::abs(r.lhs.value() - r.rhs.value()) / r.rhs.value();
        return make("lr_identity_gaussian", 0.15 - dev, "lhs " + fmt(r.lhs.value()) + " rhs " + fmt(r.rhs.value()));
    });
    guarded("order_stat_uniform", [&] {
        MCParams m = mc;
        m.n_grid = {5, 10, 20, 30, 40, 50, 60, 70, 80};
        auto f = make_family(FamilyKind::uniform, {0.0, 1.0});
        auto r = mc_tail_rate(f, EstimatorSpec::min_shift(), 0.0, 0.1, m);
        double target = order_stat_rates(f, 0.1).lower_plus.value();
        double dev = std::abs(r.beta_plus.value() - target);
        double tol = std::max(0.05 * target, 3.0 * r.stderr_plus);
        return make("order_stat_uniform", tol - dev, "mc " + fmt(r.beta_plus.value()) + " vs " + fmt(target));
    });
    return out;
}

}  // namespace ldb
