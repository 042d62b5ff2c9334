#include "ldbounds/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ldbounds/errors.hpp"
#include "ldbounds/quadrature.hpp"
#include "ldbounds/special.hpp"

namespace ldb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void need(bool ok, const std::string& msg) {
    if (!ok) throw InvalidParameter(msg);
}

double param_or(const std::vector<double>& p, std::size_t i, double dflt) {
    return i < p.size() ? p[i] : dflt;
}

bool positive(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

std::string to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::uniform: return "uniform";
        case FamilyKind::beta: return "beta";
        case FamilyKind::gamma: return "gamma";
        case FamilyKind::weibull: return "weibull";
        case FamilyKind::gaussian: return "gaussian";
        case FamilyKind::triangular: return "triangular";
        case FamilyKind::custom: return "custom";
    }
    return "?";
}

FamilyKind family_kind_from_string(const std::string& s) {
    for (auto k : {FamilyKind::uniform, FamilyKind::beta, FamilyKind::gamma, FamilyKind::weibull,
                   FamilyKind::gaussian, FamilyKind::triangular, FamilyKind::custom})
        if (to_string(k) == s) return k;
    throw InvalidParameter("unknown family kind '" + s + "'");
}

DensityFamily make_family(FamilyKind kind, std::vector<double> params) {
    DensityFamily f;
    f.kind_ = kind;
    f.name_ = to_string(kind);
    switch (kind) {
        case FamilyKind::uniform: {
            double lo = param_or(params, 0, 0.0), hi = param_or(params, 1, 1.0);
            need(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "uniform: need lo < hi");
            params = {lo, hi};
            f.a_ = lo;
            f.b_ = hi;
            f.edge_ = {1.0, 1.0 / (hi - lo), 1.0, 1.0 / (hi - lo)};
            f.log_norm_ = -std::log(hi - lo);
            f.log_concave_ = true;
            break;
        }
        case FamilyKind::beta: {
            double p = param_or(params, 0, 2.0), q = param_or(params, 1, 2.0);
            need(positive(p) && positive(q), "beta: shapes p, q must be positive");
            params = {p, q};
            f.a_ = 0.0;
            f.b_ = 1.0;
            double A = 1.0 / beta_fn(p, q);
            f.edge_ = {p, A, q, A};
            f.log_norm_ = -std::log(beta_fn(p, q));
            f.log_concave_ = p >= 1.0 && q >= 1.0;
            f.monotone_decreasing_ = p <= 1.0 && q >= 1.0 && !(p == 1.0 && q == 1.0);
            break;
        }
        case FamilyKind::gamma: {
            double k = param_or(params, 0, 2.0), sc = param_or(params, 1, 1.0);
            need(positive(k) && positive(sc), "gamma: shape and scale must be positive");
            params = {k, sc};
            f.a_ = 0.0;
            f.b_ = kInf;
            f.log_norm_ = -log_gamma(k) - k * std::log(sc);
            f.edge_ = {k, std::exp(f.log_norm_), kInf, 0.0};
            f.log_concave_ = k >= 1.0;
            f.monotone_decreasing_ = k <= 1.0;
            break;
        }
        case FamilyKind::weibull: {
            double k = param_or(params, 0, 1.5), sc = param_or(params, 1, 1.0);
            need(positive(k) && positive(sc), "weibull: shape and scale must be positive");
            params = {k, sc};
            f.a_ = 0.0;
            f.b_ = kInf;
            f.log_norm_ = std::log(k) - k * std::log(sc);
            f.edge_ = {k, std::exp(f.log_norm_), kInf, 0.0};
            f.log_concave_ = k >= 1.0;
            f.monotone_decreasing_ = k <= 1.0;
            break;
        }
        case FamilyKind::gaussian: {
            double sigma = param_or(params, 0, 1.0);
            need(positive(sigma), "gaussian: sigma must be positive");
            params = {sigma};
            f.a_ = kNegInf;
            f.b_ = kInf;
            f.regular_ = true;
            f.log_norm_ = -std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
            f.log_concave_ = true;
            break;
        }
        case FamilyKind::triangular: {
            double c = param_or(params, 0, 0.5);
            need(c > 0.0 && c < 1.0, "triangular: mode c must lie in (0,1)");
            params = {c};
            f.a_ = 0.0;
            f.b_ = 1.0;
            f.edge_ = {2.0, 2.0 / c, 2.0, 2.0 / (1.0 - c)};
            f.log_concave_ = true;
            break;
        }
        case FamilyKind::custom:
            throw InvalidParameter("custom families are built with make_custom or make_registered");
    }
    f.params_ = std::move(params);
    return f;
}

DensityFamily make_family(const std::string& kind, std::vector<double> params) {
    return make_family(family_kind_from_string(kind), std::move(params));
}

bool DensityFamily::bounded() const { return std::isfinite(a_) && std::isfinite(b_); }

EffectiveEdge DensityFamily::effective_edge() const {
    if (regular_) return {kInf, 0.0, 0.0};
    const auto& e = edge_;
    double k = std::min(e.kappa1, e.kappa2);
    EffectiveEdge out{k, 0.0, 0.0};
    if (std::abs(e.kappa1 - k) <= 1e-12) out.A1 = e.A1;
    if (std::abs(e.kappa2 - k) <= 1e-12) out.A2 = e.A2;
    return out;
}

double DensityFamily::std_log_density(double y) const {
    const auto& p = params_;
    switch (kind_) {
        case FamilyKind::uniform:
            return (y > a_ && y < b_) ? log_norm_ : kNegInf;
        case FamilyKind::beta:
            if (!(y > 0.0 && y < 1.0)) return kNegInf;
            return (p[0] - 1.0) * std::log(y) + (p[1] - 1.0) * std::log1p(-y) + log_norm_;
        case FamilyKind::gamma:
            if (!(y > 0.0) || y == kInf) return kNegInf;
            return (p[0] - 1.0) * std::log(y) - y / p[1] + log_norm_;
        case FamilyKind::weibull:
            if (!(y > 0.0) || y == kInf) return kNegInf;
            return (p[0] - 1.0) * std::log(y) - std::pow(y / p[1], p[0]) + log_norm_;
        case FamilyKind::gaussian: {
            if (!std::isfinite(y)) return kNegInf;
            double z = y / p[0];
            return -0.5 * z * z + log_norm_;
        }
        case FamilyKind::triangular: {
            double c = p[0];
            if (!(y > 0.0 && y < 1.0)) return kNegInf;
            return y <= c ? std::log(2.0 * y / c) : std::log(2.0 * (1.0 - y) / (1.0 - c));
        }
        case FamilyKind::custom: {
            if (!(y > a_ && y < b_)) return kNegInf;
            return custom_->log_density(y);
        }
    }
    return kNegInf;
}

double DensityFamily::density(double theta, double x) const { return std::exp(log_density(theta, x)); }

double DensityFamily::std_score(double y) const {
    const auto& p = params_;
    switch (kind_) {
        case FamilyKind::uniform: return 0.0;
        case FamilyKind::beta: return (p[0] - 1.0) / y - (p[1] - 1.0) / (1.0 - y);
        case FamilyKind::gamma: return (p[0] - 1.0) / y - 1.0 / p[1];
        case FamilyKind::weibull: return (p[0] - 1.0) / y - p[0] * std::pow(y / p[1], p[0] - 1.0) / p[1];
        case FamilyKind::gaussian: return -y / (p[0] * p[0]);
        case FamilyKind::triangular: return y <= p[0] ? 1.0 / y : -1.0 / (1.0 - y);
        case FamilyKind::custom: {
            if (custom_->score) return custom_->score(y);
            double h = 1e-6 * std::max(1.0, std::abs(y));
            h = std::min({h, 0.5 * (y - a_), 0.5 * (b_ - y)});
            return (custom_->log_density(y + h) - custom_->log_density(y - h)) / (2.0 * h);
        }
    }
    return 0.0;
}

double DensityFamily::score(double theta, double x) const {
    double y = x - theta;
    if (!(y > a_ && y < b_)) throw DomainError("score: point outside the open support");
    return std_score(y);
}

double DensityFamily::cdf(double theta, double x) const {
    const double y = x - theta;
    if (y <= a_) return 0.0;
    if (y >= b_) return 1.0;
    const auto& p = params_;
    switch (kind_) {
        case FamilyKind::uniform: return (y - a_) / (b_ - a_);
        case FamilyKind::beta: return boost::math::ibeta(p[0], p[1], y);
        case FamilyKind::gamma: return boost::math::gamma_p(p[0], y / p[1]);
        case FamilyKind::weibull: return -std::expm1(-std::pow(y / p[1], p[0]));
        case FamilyKind::gaussian: return 0.5 * boost::math::erfc(-y / (p[0] * std::numbers::sqrt2));
        case FamilyKind::triangular: {
            double c = p[0];
            return y <= c ? y * y / c : 1.0 - (1.0 - y) * (1.0 - y) / (1.0 - c);
        }
        case FamilyKind::custom: {
            if (custom_->cdf) return custom_->cdf(y);
            auto [lo, hi] = effective_support();
            (void)hi;
            auto fn = [this](double t) { return std::exp(custom_->log_density(t)); };
            return std::clamp(integrate(fn, lo, y).value, 0.0, 1.0);
        }
    }
    return 0.0;
}

double DensityFamily::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0,1)");
    const auto& p = params_;
    switch (kind_) {
        case FamilyKind::uniform: return a_ + u * (b_ - a_);
        case FamilyKind::beta: return boost::math::ibeta_inv(p[0], p[1], u);
        case FamilyKind::gamma: return p[1] * boost::math::gamma_p_inv(p[0], u);
        case FamilyKind::weibull: return p[1] * std::pow(-std::log1p(-u), 1.0 / p[0]);
        case FamilyKind::gaussian: return -p[0] * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
        case FamilyKind::triangular: {
            double c = p[0];
            return u < c ? std::sqrt(u * c) : 1.0 - std::sqrt((1.0 - u) * (1.0 - c));
        }
        case FamilyKind::custom: {
            if (custom_->quantile) return custom_->quantile(u);
            auto [lo, hi] = effective_support();
            for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
                double mid = 0.5 * (lo + hi);
                (cdf(0.0, mid) < u ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    return 0.0;
}

void DensityFamily::fill(std::mt19937_64& rng, std::span<double> out) const {
    const auto& p = params_;
    switch (kind_) {
        case FamilyKind::gaussian: {
            std::normal_distribution<double> nd(0.0, p[0]);
            for (double& v : out) v = nd(rng);
            return;
        }
        case FamilyKind::gamma: {
            std::gamma_distribution<double> gd(p[0], p[1]);
            for (double& v : out) {
                do v = gd(rng);
                while (!(v > 0.0));
            }
            return;
        }
        case FamilyKind::beta: {
            std::gamma_distribution<double> g1(p[0], 1.0), g2(p[1], 1.0);
            for (double& v : out) {
                do {
                    double x = g1(rng), y = g2(rng);
                    v = x / (x + y);
                } while (!(v > 0.0 && v < 1.0));
            }
            return;
        }
        case FamilyKind::uniform:
            for (double& v : out) v = a_ + open_unit(rng) * (b_ - a_);
            return;
        case FamilyKind::weibull: {
            const double inv = 1.0 / p[0];
            for (double& v : out) v = p[1] * std::pow(-std::log(open_unit(rng)), inv);
            return;
        }
        default:
            for (double& v : out) v = quantile(open_unit(rng));
            return;
    }
}

SampleBatch DensityFamily::sample(double theta, std::size_t n, std::uint64_t seed) const {
    if (n < 1) throw InvalidParameter("sample: n must be at least 1");
    SampleBatch batch{theta, std::vector<double>(n), seed};
    std::mt19937_64 rng(seed);
    fill(rng, batch.values);
    for (double& v : batch.values) v += theta;
    return batch;
}

std::pair<double, double> DensityFamily::effective_support(double tail_mass) const {
    double lo = a_, hi = b_;
    const auto& p = params_;
    switch (kind_) {
        case FamilyKind::gaussian: {
            double z = p[0] * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * tail_mass);
            return {-z, z};
        }
        case FamilyKind::gamma: hi = p[1] * boost::math::gamma_q_inv(p[0], tail_mass); break;
        case FamilyKind::weibull: hi = p[1] * std::pow(-std::log(tail_mass), 1.0 / p[0]); break;
        case FamilyKind::custom:
            if (!std::isfinite(lo)) lo = custom_->quantile(tail_mass);
            if (!std::isfinite(hi)) hi = custom_->quantile(1.0 - tail_mass);
            break;
        default: break;
    }
    return {lo, hi};
}

namespace {

bool second_differences_nonpositive(const DensityFamily& f, double lo, double hi) {
    const int m = 2000;
    const double h = (hi - lo) / (4.0 * m);
    for (int i = 1; i < m; ++i) {
        double x = lo + (hi - lo) * i / m;
        double l0 = f.std_log_density(x - h), l1 = f.std_log_density(x), l2 = f.std_log_density(x + h);
        if (!std::isfinite(l0) || !std::isfinite(l1) || !std::isfinite(l2)) continue;
        if (l0 - 2.0 * l1 + l2 > 1e-9 * std::max(1.0, std::abs(l1))) return false;
    }
    return true;
}

}  // namespace

DensityFamily make_custom(CustomDensity spec) {
    need(static_cast<bool>(spec.log_density), "custom: log_density callback required");
    need(spec.a < spec.b, "custom: need a < b");
    need((std::isfinite(spec.a) && std::isfinite(spec.b)) || static_cast<bool>(spec.quantile),
         "custom: infinite support needs a quantile callback");
    DensityFamily f;
    f.kind_ = FamilyKind::custom;
    f.name_ = spec.name;
    f.params_ = spec.params;
    f.a_ = spec.a;
    f.b_ = spec.b;
    f.edge_ = spec.edge;
    f.regular_ = spec.regular;
    f.log_concave_ = spec.log_concave;
    f.monotone_decreasing_ = spec.monotone_decreasing;
    f.custom_ = std::make_shared<const CustomDensity>(std::move(spec));

    auto [lo, hi] = f.effective_support();
    auto dens = [&f](double y) { return std::exp(f.std_log_density(y)); };
    double mass = integrate(dens, lo, hi).value;
    need(std::abs(mass - 1.0) <= 1e-8, f.name_ + ": density integrates to " + std::to_string(mass));

    if (!f.regular_) {
        const auto& e = f.edge_;
        double h = 1e-4 * (f.bounded() ? f.b_ - f.a_ : 1.0);
        if (e.A1 > 0.0 && std::isfinite(f.a_)) {
            double r = dens(f.a_ + h) / (e.A1 * std::pow(h, e.kappa1 - 1.0));
            need(r >= 0.9 && r <= 1.1, f.name_ + ": left edge metadata inconsistent (ratio " + std::to_string(r) + ")");
        }
        if (e.A2 > 0.0 && std::isfinite(f.b_)) {
            double r = dens(f.b_ - h) / (e.A2 * std::pow(h, e.kappa2 - 1.0));
            need(r >= 0.9 && r <= 1.1, f.name_ + ": right edge metadata inconsistent (ratio " + std::to_string(r) + ")");
        }
    }
    if (f.log_concave_)
        need(second_differences_nonpositive(f, lo, hi), f.name_ + ": asserted log-concave but is not");
    if (!std::isfinite(f.b_)) {
        // tail condition for treating the half line as the A2 = 0 case
        double probe = hi;
        need(std::isfinite(f.std_score(probe)), f.name_ + ": score not finite at the far tail");
    }
    return f;
}

DensityFamily make_registered(const std::string& name, const std::vector<double>& params) {
    if (name == "power") {
        double k = param_or(params, 0, 0.5);
        need(positive(k), "power: kappa must be positive");
        CustomDensity c;
        c.name = "power";
        c.params = {k};
        c.a = 0.0;
        c.b = 1.0;
        c.log_density = [k](double y) { return std::log(k) + (k - 1.0) * std::log(y); };
        c.score = [k](double y) { return (k - 1.0) / y; };
        c.cdf = [k](double y) { return std::pow(y, k); };
        c.quantile = [k](double u) { return std::pow(u, 1.0 / k); };
        c.edge = {k, k, 1.0, k};
        c.log_concave = k >= 1.0;
        c.monotone_decreasing = k < 1.0;
        DensityFamily f = make_custom(std::move(c));
        return f;
    }
    throw InvalidParameter("unknown registered density '" + name + "'");
}

std::vector<std::string> registered_names() { return {"power"}; }

Extended fisher_information(const DensityFamily& f) {
    if (!f.regular() && !(f.effective_edge().kappa > 2.0)) return Extended::infinite();
    auto [lo, hi] = f.effective_support(1e-18);
    auto integrand = [&f](double y) {
        double l = f.std_log_density(y);
        if (!std::isfinite(l)) return 0.0;
        double sc = f.std_score(y);
        return sc * sc * std::exp(l);
    };
    std::vector<double> bp{lo, hi};
    if (f.kind() == FamilyKind::triangular) bp = {lo, f.params()[0], hi};
    return Extended(integrate(integrand, bp).value);
}

}  // namespace ldb
