#include "ldbounds/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "ldbounds/errors.hpp"
#include "ldbounds/optimize.hpp"
#include "ldbounds/special.hpp"

namespace ldb {

namespace {

bool kappa_is_one(double k) { return std::abs(k - 1.0) < 1e-9; }

double flat_tol(const ScalingProfile& p, double scale) {
    double t = 1e-9 * std::max(1.0, std::abs(scale));
    if (!p.closed_form) t = std::max(t, p.max_uncertainty);
    return t;
}

// log(s^m + (1-s)^m) * (kappa - 1) with m = 1/(kappa - 1), without overflow
double log_mix(double kappa, double s) {
    const double m = 1.0 / (kappa - 1.0);
    double u = m * std::log(s), v = m * std::log1p(-s);
    double hi = std::max(u, v), lo = std::min(u, v);
    return (kappa - 1.0) * (hi + std::log1p(std::exp(lo - hi)));
}

double objective_from(double isg, double kappa, double s) {
    return isg / (s * (1.0 - s)) * std::exp(log_mix(kappa, s));
}

struct Scan {
    std::size_t best = 0;
    double lo = 0.0, hi = 0.0;
};

// bracket around the best grid index (argmax if maximise). Ladder profiles stay
// inside the grid: near s = 0, 1 their extrapolation error is divided by s(1-s).
Scan scan(const ScalingProfile& p, const std::vector<double>& v, bool maximise) {
    const auto& s = p.s_grid;
    Scan out;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (maximise ? v[i] > v[out.best] : v[i] < v[out.best]) out.best = i;
    out.lo = out.best > 0 ? s[out.best - 1] : (p.closed_form ? kSEdge : s.front());
    out.hi = out.best + 1 < s.size() ? s[out.best + 1] : (p.closed_form ? 1.0 - kSEdge : s.back());
    return out;
}

}  // namespace

double alpha2_objective(const ScalingProfile& p, double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("alpha2_objective: s must lie in (0,1)");
    return objective_from(p.eval(s), p.kappa, s);
}

Optimum alpha1_bar(const ScalingProfile& p) {
    if (p.s_grid.size() < 17) throw InvalidParameter("alpha1_bar: profile grid needs at least 17 points");
    const double c = std::pow(2.0, p.kappa);
    const auto& v = p.isg;
    auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double tol = flat_tol(p, *mx);
    if (*mx - *mn <= tol && std::abs(p.isg_at_0 - *mx) <= tol && std::abs(p.isg_at_1 - *mx) <= tol)
        return {c * p.eval(0.5), 0.5, false};

    Scan sc = scan(p, v, true);
    Extremum in = golden_max(p.eval, sc.lo, sc.hi);
    Optimum best{c * in.fx, in.x, false};
    const double slack = 1e-12 * std::max(1.0, std::abs(in.fx));
    if (p.isg_at_1 > in.fx + slack && p.isg_at_1 >= p.isg_at_0) return {c * p.isg_at_1, 1.0 - kSEdge, true};
    if (p.isg_at_0 > in.fx + slack) return {c * p.isg_at_0, kSEdge, true};
    return best;
}

Optimum alpha2_bar(const ScalingProfile& p) {
    if (p.s_grid.size() < 17) throw InvalidParameter("alpha2_bar: profile grid needs at least 17 points");
    const double k = p.kappa;
    if (kappa_is_one(k)) return {2.0 * p.eval(0.5), 0.5, false};

    std::vector<double> h;
    for (std::size_t i = 0; i < p.s_grid.size(); ++i) h.push_back(objective_from(p.isg[i], k, p.s_grid[i]));
    auto [mn, mx] = std::minmax_element(h.begin(), h.end());
    const double tol = flat_tol(p, *mx) * 4.0;
    auto obj = [&p, k](double s) { return objective_from(p.eval(s), k, s); };

    if (k < 1.0) {
        // edge limits of the objective are I^0_g and I^1_g
        if (*mx - *mn <= tol && std::abs(p.isg_at_0 - *mx) <= tol && std::abs(p.isg_at_1 - *mx) <= tol)
            return {obj(0.5), 0.5, false};
        Scan sc = scan(p, h, true);
        Extremum in = golden_max(obj, sc.lo, sc.hi);
        const double slack = 1e-12 * std::max(1.0, std::abs(in.fx));
        if (p.isg_at_1 > in.fx + slack && p.isg_at_1 >= p.isg_at_0) return {p.isg_at_1, 1.0 - kSEdge, true};
        if (p.isg_at_0 > in.fx + slack) return {p.isg_at_0, kSEdge, true};
        return {in.fx, in.x, false};
    }

    if (*mx - *mn <= tol) return {obj(0.5), 0.5, false};
    Scan sc = scan(p, h, false);
    Extremum in = golden_min(obj, sc.lo, sc.hi);
    Optimum best{in.fx, in.x, false};
    // edge limits here are derivatives of I^s_g; take them when they look finite
    if (!p.closed_form) return best;
    for (double e : {kSEdge, 1.0 - kSEdge}) {
        double e2 = e < 0.5 ? 2.0 * kSEdge : 1.0 - 2.0 * kSEdge;
        double h1 = obj(e), h2 = obj(e2);
        if (!std::isfinite(h1) || std::abs(h1 - h2) > 1e-3 * std::abs(h1)) continue;
        double lim = 2.0 * h1 - h2;
        if (lim < best.value - 1e-12 * std::abs(best.value)) best = {lim, e, true};
    }
    return best;
}

Coincidence coincidence(const ScalingProfile& p, const Optimum& a1, const Optimum& a2) {
    Coincidence c;
    const double half = std::pow(2.0, p.kappa) * p.eval(0.5);
    const double scale = std::max({std::abs(a1.value), std::abs(a2.value), 1e-300});
    c.tol = 1e-6 * scale;
    if (!p.closed_form) c.tol = std::max(c.tol, 3.0 * std::pow(2.0, p.kappa) * p.max_uncertainty);
    c.coincide = std::abs(a1.value - a2.value) <= c.tol;
    c.eq163 = std::abs(a1.value - half) <= c.tol;
    c.eq15 = std::abs(half - a2.value) <= c.tol;
    if (p.kappa <= 1.0 + 1e-9) c.consistent = (c.coincide == c.eq163);
    return c;
}

Coincidence coincidence(const ScalingProfile& p) { return coincidence(p, alpha1_bar(p), alpha2_bar(p)); }

BoundPair compute_bounds(const ScalingProfile& p) {
    Optimum a1 = alpha1_bar(p), a2 = alpha2_bar(p);
    Coincidence c = coincidence(p, a1, a2);
    BoundPair b;
    b.alpha1_bar = a1.value;
    b.alpha2_bar = a2.value;
    b.s_star1 = a1.s_star;
    b.s_star2 = a2.s_star;
    b.boundary1 = a1.at_boundary;
    b.boundary2 = a2.at_boundary;
    b.kappa = p.kappa;
    b.coincide = c.coincide;
    b.symmetric_at_half = c.eq163;
    b.eq15 = c.eq15;
    b.tol = c.tol;
    b.attainability_open = p.regime == Regime::kappa_0_1 && p.A1 > 0.0 && p.A2 > 0.0;
    b.gap = a1.value - a2.value;
    return b;
}

BoundPair closed_form_bounds(Regime regime, double A1, double A2, double kappa, double J) {
    ScalingProfile p = closed_form_profile(regime, A1, A2, kappa, J);
    BoundPair b = compute_bounds(p);
    const double k = p.kappa;
    const double top = std::max(A1, A2);
    const bool equal = std::abs(A1 - A2) <= 1e-12 * std::max(top, 1e-300);
    static const double t0 = solve_t0();

    auto set1 = [&](double v, double s, bool edge) {
        b.alpha1_bar = v;
        b.s_star1 = s;
        b.boundary1 = edge;
        b.closed_alpha1 = true;
    };
    auto set2 = [&](double v, double s, bool edge) {
        b.alpha2_bar = v;
        b.s_star2 = s;
        b.boundary2 = edge;
        b.closed_alpha2 = true;
    };

    switch (regime) {
        case Regime::regular:
        case Regime::semi_regular:
            set1(J / 2.0, 0.5, false);
            set2(J / 2.0, 0.5, false);
            break;
        case Regime::kappa_one:
            if (equal) set1(2.0 * top, 0.5, false);
            else if (A1 > A2) set1(2.0 * A1, 1.0 - kSEdge, true);
            else set1(2.0 * A2, kSEdge, true);
            set2(A1 + A2, 0.5, false);
            break;
        case Regime::kappa_two:
            set1((A1 + A2) / 2.0, 0.5, false);
            set2((A1 + A2) / 2.0, 0.5, false);
            break;
        case Regime::kappa_1_2:
            if (equal) {
                double v = A1 * std::pow(2.0, k - 1.0) * (3.0 - k) * beta_fn((1.0 + k) / 2.0, 2.0 - k) / k;
                set1(v, 0.5, false);
                set2(v, 0.5, false);
            } else if (k < 2.0 - t0 && A2 == 0.0) {
                set1(A1 * std::pow(2.0, k) / k, 1.0 - kSEdge, true);
            } else if (k < 2.0 - t0 && A1 == 0.0) {
                set1(A2 * std::pow(2.0, k) / k, kSEdge, true);
            }
            break;
        case Regime::kappa_0_1:
            if (equal) {
                double v = A1 * std::pow(2.0, k) * (1.0 - k) * beta_fn((1.0 + k) / 2.0, 1.0 - k) / k;
                set1(v, 0.5, false);
                set2(v, 0.5, false);
            } else if (A2 == 0.0) {
                // alpha2_bar stays numeric: the objective peaks inside (0,1), above A1/kappa
                set1(A1 * std::pow(2.0, k) / k, 1.0 - kSEdge, true);
            } else if (A1 == 0.0) {
                set1(A2 * std::pow(2.0, k) / k, kSEdge, true);
            }
            break;
    }
    Coincidence c = coincidence(p, {b.alpha1_bar, b.s_star1, b.boundary1}, {b.alpha2_bar, b.s_star2, b.boundary2});
    b.coincide = c.coincide;
    b.symmetric_at_half = c.eq163;
    b.eq15 = c.eq15;
    b.tol = c.tol;
    b.gap = b.alpha1_bar - b.alpha2_bar;
    return b;
}

}  // namespace ldb
