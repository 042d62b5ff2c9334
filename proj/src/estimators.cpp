#include "ldbounds/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ldbounds/errors.hpp"

namespace ldb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double width_tol(double a, double b, double res) { return res * std::max({1.0, std::abs(a), std::abs(b)}); }

// sup{k < 0} on [a, c] given k(a) < 0 <= k(c)
double last_negative(const std::function<double(double)>& k, double a, double c, double res) {
    while (c - a > width_tol(a, c, res)) {
        double m = 0.5 * (a + c);
        (k(m) < 0.0 ? a : c) = m;
    }
    return 0.5 * (a + c);
}

// inf{k > 0} on [c, b] given k(c) <= 0 < k(b)
double first_positive(const std::function<double(double)>& k, double c, double b, double res) {
    while (b - c > width_tol(c, b, res)) {
        double m = 0.5 * (c + b);
        (k(m) > 0.0 ? b : c) = m;
    }
    return 0.5 * (c + b);
}

}  // namespace

double monotone_midpoint(const std::function<double(double)>& k, double lo, double hi, double res) {
    if (!(lo < hi)) throw DomainError("monotone_midpoint: empty interval");
    double a = lo, b = hi;
    double fa = -kInf, fb = kInf;
    // pull infinite ends in until the sign is right
    if (!std::isfinite(a) || !std::isfinite(b)) {
        double c = std::isfinite(a) ? a + 1.0 : (std::isfinite(b) ? b - 1.0 : 0.0);
        if (!std::isfinite(a)) {
            double step = 1.0;
            int it = 0;
            for (a = std::min(c, b) - step; (fa = k(a)) >= 0.0; a = std::min(c, b) - step) {
                if (++it > 1100) throw NonConvergence("monotone_midpoint: no negative value to the left");
                step *= 2.0;
            }
        }
        if (!std::isfinite(b)) {
            double step = 1.0;
            int it = 0;
            for (b = std::max(c, a) + step; (fb = k(b)) <= 0.0; b = std::max(c, a) + step) {
                if (++it > 1100) throw NonConvergence("monotone_midpoint: no positive value to the right");
                step *= 2.0;
            }
        }
    }
    int side = 0, slow = 0;
    double last_width = b - a;
    while (b - a > width_tol(a, b, res)) {
        double c;
        if (std::isfinite(fa) && std::isfinite(fb) && fb > fa && slow < 2) {
            c = (a * fb - b * fa) / (fb - fa);
            if (!(c > a && c < b)) c = 0.5 * (a + b);
        } else {
            c = 0.5 * (a + b);
            slow = 0;
        }
        double kc = k(c);
        if (kc < 0.0) {
            a = c;
            fa = kc;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else if (kc > 0.0) {
            b = c;
            fb = kc;
            if (side == 1) fa *= 0.5;
            side = 1;
        } else {
            // flat stretch (or exact root): resolve both ends of the zero set
            return 0.5 * (last_negative(k, a, c, res) + first_positive(k, c, b, res));
        }
        double w = b - a;
        slow = w > 0.5 * last_width ? slow + 1 : 0;
        last_width = w;
    }
    return 0.5 * (a + b);
}

std::string to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::mle: return "mle";
        case EstimatorKind::lr: return "lr";
        case EstimatorKind::min_shift: return "min_shift";
        case EstimatorKind::max_shift: return "max_shift";
        case EstimatorKind::shifted_min: return "shifted_min";
        case EstimatorKind::convex_combo: return "convex_combo";
    }
    return "?";
}

EstimatorKind estimator_kind_from_string(const std::string& s) {
    for (auto k : {EstimatorKind::mle, EstimatorKind::lr, EstimatorKind::min_shift, EstimatorKind::max_shift,
                   EstimatorKind::shifted_min, EstimatorKind::convex_combo})
        if (to_string(k) == s) return k;
    throw InvalidParameter("unknown estimator kind '" + s + "'");
}

std::string EstimatorSpec::name() const {
    std::ostringstream os;
    os << to_string(kind);
    if (eps_dependent()) os << "(eps=" << eps << ")";
    if (kind == EstimatorKind::convex_combo) os << "(lambda=" << lambda << ")";
    return os.str();
}

void validate(const EstimatorSpec& spec, const DensityFamily& f) {
    const bool lo = std::isfinite(f.a()), hi = std::isfinite(f.b());
    switch (spec.kind) {
        case EstimatorKind::mle:
            if (!f.log_concave() && !f.monotone_decreasing())
                throw UnsupportedFamily("mle needs a log-concave or monotonically decreasing density (" + f.name() + ")");
            break;
        case EstimatorKind::lr:
            if (!(spec.eps > 0.0)) throw InvalidParameter("lr needs eps > 0");
            if (!f.log_concave()) throw UnsupportedFamily("lr needs a log-concave density (" + f.name() + ")");
            break;
        case EstimatorKind::min_shift:
            if (!lo) throw UnsupportedFamily("min_shift needs a finite left support end");
            break;
        case EstimatorKind::max_shift:
            if (!hi) throw UnsupportedFamily("max_shift needs a finite right support end");
            break;
        case EstimatorKind::shifted_min:
            if (!(spec.eps > 0.0)) throw InvalidParameter("shifted_min needs eps > 0");
            if (!lo) throw UnsupportedFamily("shifted_min needs a finite left support end");
            break;
        case EstimatorKind::convex_combo:
            if (!(spec.lambda > 0.0 && spec.lambda < 1.0)) throw InvalidParameter("convex_combo needs lambda in (0,1)");
            if (!lo || !hi) throw UnsupportedFamily("convex_combo needs a bounded support");
            break;
    }
}

double estimate(const EstimatorSpec& spec, const DensityFamily& f, std::span<const double> x) {
    if (x.empty()) throw InvalidParameter("estimate: empty batch");
    validate(spec, f);
    auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
    const double under = *mn_it - f.a();  // theta_n lower-bar: min - a
    const double over = *mx_it - f.b();   // theta_n upper-bar: max - b
    switch (spec.kind) {
        case EstimatorKind::min_shift: return under;
        case EstimatorKind::max_shift: return over;
        case EstimatorKind::shifted_min: return under - spec.eps;
        case EstimatorKind::convex_combo: return spec.lambda * under + (1.0 - spec.lambda) * over;
        case EstimatorKind::mle: {
            if (f.monotone_decreasing()) return under;
            // sum of scores is nondecreasing in theta for log-concave f
            auto k = [&](double th) {
                double acc = 0.0;
                for (double xi : x) acc += f.std_score(xi - th);
                return acc;
            };
            return monotone_midpoint(k, over, under);
        }
        case EstimatorKind::lr: {
            const double e = spec.eps;
            if (std::isfinite(under) && std::isfinite(over) && under - over <= 2.0 * e) return 0.5 * (under + over);
            auto k = [&](double z) {
                double acc = 0.0;
                for (double xi : x) acc += f.std_log_density(xi - z + e) - f.std_log_density(xi - z - e);
                return acc;
            };
            return monotone_midpoint(k, over + e, under - e);
        }
    }
    return 0.0;
}

}  // namespace ldb
