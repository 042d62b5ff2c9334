#include "ldbounds/renyi.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "ldbounds/errors.hpp"
#include "ldbounds/quadrature.hpp"
#include "ldbounds/special.hpp"

namespace ldb {

namespace {

void check_s(double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("Renyi order s must lie in (0,1), got " + std::to_string(s));
}

std::pair<double, double> window(const FamilyPoint& p) {
    auto [lo, hi] = p.family.effective_support(1e-17);
    return {lo + p.theta, hi + p.theta};
}

bool disjoint(const FamilyPoint& p, const FamilyPoint& q) {
    double lo = std::max(p.family.a() + p.theta, q.family.a() + q.theta);
    double hi = std::min(p.family.b() + p.theta, q.family.b() + q.theta);
    return !(lo < hi);
}

std::vector<double> breakpoints(const FamilyPoint& p, const FamilyPoint& q) {
    auto [plo, phi] = window(p);
    auto [qlo, qhi] = window(q);
    std::vector<double> bp{plo, phi, qlo, qhi};
    for (const FamilyPoint* fp : {&p, &q})
        if (fp->family.kind() == FamilyKind::triangular) bp.push_back(fp->family.params()[0] + fp->theta);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
}

// s p + (1-s) q - p^s q^(1-s), written to survive p ~ q
double gap_integrand(double lp, double lq, double s) {
    const bool fp = std::isfinite(lp), fq = std::isfinite(lq);
    if (!fp && !fq) return 0.0;
    if (!fq) return s * std::exp(lp);
    if (!fp) return (1.0 - s) * std::exp(lq);
    const double d = lp - lq;
    if (std::abs(d) < 0.1) {
        double term = d, sk = s, sum = 0.0;
        for (int k = 2; k <= 16; ++k) {
            term *= d / k;
            sk *= s;
            sum += (s - sk) * term;
        }
        return std::exp(lq) * sum;
    }
    return s * std::exp(lp) + (1.0 - s) * std::exp(lq) - std::exp(s * lp + (1.0 - s) * lq);
}

}  // namespace

Extended renyi_divergence(const FamilyPoint& p, const FamilyPoint& q, double s) {
    check_s(s);
    if (disjoint(p, q)) return Extended::infinite();
    const auto bp = breakpoints(p, q);
    auto gap = [&](double x) {
        return gap_integrand(p.family.log_density(p.theta, x), q.family.log_density(q.theta, x), s);
    };
    double D = integrate(gap, bp).value;
    if (D <= 0.5) return Extended(std::max(0.0, -std::log1p(-D)));
    // far apart: the overlap integral itself is the small, well-conditioned quantity
    auto overlap = [&](double x) {
        double lp = p.family.log_density(p.theta, x), lq = q.family.log_density(q.theta, x);
        if (!std::isfinite(lp) || !std::isfinite(lq)) return 0.0;
        return std::exp(s * lp + (1.0 - s) * lq);
    };
    double ov = integrate(overlap, bp).value;
    if (!(ov > 0.0)) return Extended::infinite();
    return Extended(-std::log(ov));
}

Extended renyi_divergence(const DensityFamily& f, double theta_p, double theta_q, double s) {
    return renyi_divergence(FamilyPoint{f, theta_p}, FamilyPoint{f, theta_q}, s);
}

Extended renyi_endpoint(const FamilyPoint& p, const FamilyPoint& q, int which) {
    if (which != 0 && which != 1) throw DomainError("renyi_endpoint: which must be 0 or 1");
    const FamilyPoint& support = which == 0 ? p : q;
    const FamilyPoint& measure = which == 0 ? q : p;
    if (disjoint(p, q)) return Extended::infinite();
    double lo = support.family.a() + support.theta, hi = support.family.b() + support.theta;
    double outside = 0.0;
    if (std::isfinite(lo)) outside += measure.family.cdf(measure.theta, lo);
    if (std::isfinite(hi)) outside += 1.0 - measure.family.cdf(measure.theta, hi);
    if (outside >= 1.0) return Extended::infinite();
    return Extended(std::max(0.0, -std::log1p(-outside)));
}

RenyiCurve renyi_curve(const DensityFamily& f, double theta, double eps, const std::vector<double>& s_grid) {
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        check_s(s_grid[i]);
        if (i > 0 && !(s_grid[i] > s_grid[i - 1])) throw InvalidParameter("renyi_curve: s_grid must be strictly increasing");
    }
    RenyiCurve c;
    c.s_grid = s_grid;
    for (double s : s_grid) c.values.push_back(renyi_divergence(f, theta - 0.5 * eps, theta + 0.5 * eps, s).as_double());
    return c;
}

double ScalingFunction::operator()(double eps) const {
    switch (tag) {
        case GTag::square: return eps * eps;
        case GTag::abs: return std::abs(eps);
        case GTag::sq_log: return -eps * eps * std::log(eps);
        case GTag::power: return std::pow(eps, power_kappa);
        case GTag::custom: return fn(eps);
    }
    return 0.0;
}

std::string ScalingFunction::name() const {
    switch (tag) {
        case GTag::square: return "square";
        case GTag::abs: return "abs";
        case GTag::sq_log: return "sq_log";
        case GTag::power: return "power";
        case GTag::custom: return custom_name;
    }
    return "?";
}

ScalingFunction scaling_from_string(const std::string& tag, double kappa) {
    if (tag == "square") return ScalingFunction::square();
    if (tag == "abs") return ScalingFunction::abs();
    if (tag == "sq_log") return ScalingFunction::sq_log();
    if (tag == "power") {
        if (!(kappa > 0.0)) throw InvalidParameter("power scaling needs kappa > 0");
        return ScalingFunction::power(kappa);
    }
    throw InvalidParameter("unknown scaling function '" + tag + "'");
}

double kappa_of_g(const ScalingFunction& g) {
    switch (g.tag) {
        case GTag::square: return 2.0;
        case GTag::abs: return 1.0;
        case GTag::sq_log: return 2.0;
        case GTag::power: return g.power_kappa;
        case GTag::custom: break;
    }
    std::vector<double> est;
    for (int k = 2; k <= 12; k += 2) {
        double eps = std::pow(10.0, -k);
        est.push_back(std::log(g(2.0 * eps) / g(eps)) / std::log(2.0));
    }
    double last = est.back(), prev = est[est.size() - 2];
    if (!std::isfinite(last) || std::abs(last - prev) > 1e-3)
        throw NonConvergence("kappa_of_g: ladder estimates disagree (" + std::to_string(prev) + " vs " +
                             std::to_string(last) + ")");
    return last;
}

std::vector<double> default_eps_ladder(double width) {
    std::vector<double> v;
    for (int k = 0; k < 8; ++k) v.push_back(0.2 * width * std::ldexp(1.0, -k));
    return v;
}

std::vector<double> default_s_grid() {
    std::vector<double> v;
    for (int k = 1; k <= 19; ++k) v.push_back(0.05 * k);
    return v;
}

namespace {

// L + c eps^p through three rungs
std::optional<double> fit_power(const double* e, const double* r) {
    const double d1 = r[0] - r[1], d2 = r[1] - r[2];
    const double scale = std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2]), 1e-300});
    if (std::abs(d2) <= 1e-13 * scale) return r[2];
    if (d1 == 0.0) return std::nullopt;
    const double target = d1 / d2;
    if (!(target > 1.0)) return std::nullopt;
    auto phi = [&](double p) {
        return (std::pow(e[0], p) - std::pow(e[1], p)) / (std::pow(e[1], p) - std::pow(e[2], p));
    };
    double lo = 1e-4, hi = 50.0;
    if (!(phi(lo) < target && phi(hi) > target)) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        double mid = std::sqrt(lo * hi);
        (phi(mid) < target ? lo : hi) = mid;
    }
    const double p = std::sqrt(lo * hi);
    const double c = d2 / (std::pow(e[1], p) - std::pow(e[2], p));
    return r[2] - c * std::pow(e[2], p);
}

// L + c/(-log eps) + d eps through three rungs
std::optional<double> fit_sq_log(const double* e, const double* r) {
    double m[3][3], rhs[3];
    for (int i = 0; i < 3; ++i) {
        m[i][0] = 1.0;
        m[i][1] = -1.0 / std::log(e[i]);
        m[i][2] = e[i];
        rhs[i] = r[i];
    }
    auto det3 = [](double a[3][3]) {
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };
    double det = det3(m);
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    double mx[3][3];
    for (int i = 0; i < 3; ++i) {
        mx[i][0] = rhs[i];
        mx[i][1] = m[i][1];
        mx[i][2] = m[i][2];
    }
    return det3(mx) / det;
}

}  // namespace

LimitEstimate extrapolate_ladder(const std::vector<double>& eps, const std::vector<double>& ratios, GTag tag) {
    const std::size_t n = eps.size();
    if (n < 4 || ratios.size() != n) throw InvalidParameter("extrapolation needs at least 4 rungs");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(eps[i] > 0.0)) throw InvalidParameter("eps ladder must be positive");
        if (i > 0 && !(eps[i] < eps[i - 1])) throw InvalidParameter("eps ladder must be strictly decreasing");
    }
    LimitEstimate out;
    out.ratios = ratios;
    bool growing = true;
    for (std::size_t i = n - 3; i < n; ++i)
        if (!(ratios[i] > 1.1 * ratios[i - 1] && ratios[i - 1] > 0.0)) growing = false;
    if (growing) throw DivergenceError("I^s/g(eps) grows by more than 10% per rung; g is too small for this family");

    auto fit = [&](std::size_t i) {
        return tag == GTag::sq_log ? fit_sq_log(&eps[i], &ratios[i]) : fit_power(&eps[i], &ratios[i]);
    };
    auto last = fit(n - 3), prev = fit(n - 4);
    if (last && prev) {
        out.value = *last;
        out.uncertainty = std::abs(*last - *prev);
    } else {
        out.value = ratios[n - 1];
        out.uncertainty = std::abs(ratios[n - 1] - ratios[n - 2]);
    }
    return out;
}

LimitEstimate scaled_limit(const DensityFamily& f, double theta, double s, const ScalingFunction& g,
                           const std::vector<double>& eps_ladder) {
    check_s(s);
    std::vector<double> ratios;
    for (double eps : eps_ladder) {
        Extended I = renyi_divergence(f, theta - 0.5 * eps, theta + 0.5 * eps, s);
        if (I.is_infinite()) throw DivergenceError("scaled_limit: shifted supports are disjoint at eps=" + std::to_string(eps));
        ratios.push_back(I.value() / g(eps));
    }
    return extrapolate_ladder(eps_ladder, ratios, g.tag);
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::regular: return "regular";
        case Regime::semi_regular: return "semi_regular";
        case Regime::kappa_one: return "kappa_one";
        case Regime::kappa_two: return "kappa_two";
        case Regime::kappa_1_2: return "kappa_1_2";
        case Regime::kappa_0_1: return "kappa_0_1";
    }
    return "?";
}

RegimeInfo classify(const DensityFamily& f) {
    RegimeInfo info;
    if (f.regular()) {
        info.regime = Regime::regular;
        info.kappa = 2.0;
        info.J = fisher_information(f);
        info.g = ScalingFunction::square();
        return info;
    }
    EffectiveEdge e = f.effective_edge();
    info.A1 = e.A1;
    info.A2 = e.A2;
    info.kappa = e.kappa;
    if (std::abs(e.kappa - 1.0) < 1e-9) {
        info.regime = Regime::kappa_one;
        info.kappa = 1.0;
        info.g = ScalingFunction::abs();
    } else if (std::abs(e.kappa - 2.0) < 1e-9) {
        info.regime = Regime::kappa_two;
        info.kappa = 2.0;
        info.g = ScalingFunction::sq_log();
    } else if (e.kappa > 2.0) {
        info.regime = Regime::semi_regular;
        info.kappa = 2.0;
        info.g = ScalingFunction::square();
        info.J = fisher_information(f);
        return info;
    } else if (e.kappa > 1.0) {
        info.regime = Regime::kappa_1_2;
        info.g = ScalingFunction::power(e.kappa);
    } else {
        info.regime = Regime::kappa_0_1;
        info.g = ScalingFunction::power(e.kappa);
    }
    info.J = Extended::infinite();
    return info;
}

double closed_form_isg(Regime regime, double A1, double A2, double kappa, double s, double J) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("closed_form_isg: s must lie in [0,1]");
    if (!(A1 >= 0.0 && A2 >= 0.0)) throw InvalidParameter("closed_form_isg: A1, A2 must be nonnegative");
    const double t = 1.0 - s;
    switch (regime) {
        case Regime::regular:
        case Regime::semi_regular:
            if (!(J >= 0.0) || !std::isfinite(J)) throw InvalidParameter("closed_form_isg: finite J required");
            return s * t * J / 2.0;
        case Regime::kappa_one:
            if (std::abs(kappa - 1.0) >= 1e-9) throw InvalidParameter("closed_form_isg: kappa_one regime needs kappa = 1");
            return A1 * s + A2 * t;
        case Regime::kappa_two:
            if (std::abs(kappa - 2.0) >= 1e-9) throw InvalidParameter("closed_form_isg: kappa_two regime needs kappa = 2");
            return (A1 + A2) * s * t / 2.0;
        case Regime::kappa_1_2: {
            if (!(kappa > 1.0 && kappa < 2.0)) throw InvalidParameter("closed_form_isg: kappa_1_2 regime needs 1 < kappa < 2");
            double v = 0.0;
            if (A1 > 0.0 && s > 0.0) v += A1 * s * (1.0 - s * (kappa - 1.0)) * beta_fn(s + kappa * t, 2.0 - kappa);
            if (A2 > 0.0 && t > 0.0) v += A2 * t * (1.0 - t * (kappa - 1.0)) * beta_fn(t + kappa * s, 2.0 - kappa);
            return v / kappa;
        }
        case Regime::kappa_0_1: {
            if (!(kappa > 0.0 && kappa < 1.0)) throw InvalidParameter("closed_form_isg: kappa_0_1 regime needs 0 < kappa < 1");
            double v = 0.0;
            if (A1 > 0.0 && s > 0.0) v += A1 * s * beta_fn(s + kappa * t, 1.0 - kappa);
            if (A2 > 0.0 && t > 0.0) v += A2 * t * beta_fn(t + kappa * s, 1.0 - kappa);
            return (1.0 - kappa) * v / kappa;
        }
    }
    return 0.0;
}

namespace {

ScalingFunction g_for(Regime r, double kappa) {
    switch (r) {
        case Regime::regular:
        case Regime::semi_regular: return ScalingFunction::square();
        case Regime::kappa_one: return ScalingFunction::abs();
        case Regime::kappa_two: return ScalingFunction::sq_log();
        default: return ScalingFunction::power(kappa);
    }
}

}  // namespace

ScalingProfile closed_form_profile(Regime regime, double A1, double A2, double kappa, double J,
                                   std::vector<double> s_grid) {
    ScalingProfile p;
    p.regime = regime;
    p.g = g_for(regime, kappa);
    p.kappa = (regime == Regime::regular || regime == Regime::semi_regular) ? 2.0 : kappa;
    p.A1 = A1;
    p.A2 = A2;
    p.J = J;
    p.closed_form = true;
    p.s_grid = std::move(s_grid);
    double k = p.kappa;
    p.eval = [=](double s) { return closed_form_isg(regime, A1, A2, k, s, J); };
    for (double s : p.s_grid) {
        p.isg.push_back(p.eval(s));
        p.uncertainty.push_back(0.0);
    }
    p.isg_at_0 = p.eval(0.0);
    p.isg_at_1 = p.eval(1.0);
    return p;
}

ScalingProfile closed_form_profile(const DensityFamily& f, std::vector<double> s_grid) {
    RegimeInfo info = classify(f);
    double J = info.J.is_finite() ? info.J.value() : std::numeric_limits<double>::quiet_NaN();
    return closed_form_profile(info.regime, info.A1, info.A2, info.kappa, J, std::move(s_grid));
}

ScalingProfile ladder_profile(const DensityFamily& f, double theta, const ScalingFunction& g,
                              const std::vector<double>& eps_ladder, std::vector<double> s_grid) {
    ScalingProfile p;
    RegimeInfo info = classify(f);
    p.regime = info.regime;
    p.A1 = info.A1;
    p.A2 = info.A2;
    if (info.J.is_finite()) p.J = info.J.value();
    p.g = g;
    p.kappa = kappa_of_g(g);
    p.theta = theta;
    p.s_grid = std::move(s_grid);
    for (double s : p.s_grid) {
        LimitEstimate le = scaled_limit(f, theta, s, g, eps_ladder);
        p.isg.push_back(le.value);
        p.uncertainty.push_back(le.uncertainty);
        p.max_uncertainty = std::max(p.max_uncertainty, le.uncertainty);
        const auto& r = le.ratios;
        p.uniformity = std::max(p.uniformity, std::abs(r[r.size() - 1] - r[r.size() - 2]));
    }
    for (int which : {0, 1}) {
        std::vector<double> ratios;
        for (double eps : eps_ladder) {
            FamilyPoint lo{f, theta - 0.5 * eps}, hi{f, theta + 0.5 * eps};
            ratios.push_back(renyi_endpoint(lo, hi, which).as_double() / g(eps));
        }
        LimitEstimate le = extrapolate_ladder(eps_ladder, ratios, g.tag);
        // a divergence limit is >= 0; anything within noise of 0 is taken as 0
        double v = le.value <= 3.0 * le.uncertainty ? 0.0 : le.value;
        (which == 0 ? p.isg_at_0 : p.isg_at_1) = v;
        p.max_uncertainty = std::max(p.max_uncertainty, le.uncertainty);
    }
    auto ladder = eps_ladder;
    p.eval = [f, theta, g, ladder](double s) { return scaled_limit(f, theta, s, g, ladder).value; };
    return p;
}

}  // namespace ldb
