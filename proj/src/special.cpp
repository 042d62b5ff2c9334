#include "ldbounds/special.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "ldbounds/errors.hpp"

namespace ldb {

namespace {

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError(std::string(what) + ": argument must be positive and finite, got " + std::to_string(x));
}

}  // namespace

double log_gamma(double x) {
    require_positive(x, "log_gamma");
    return boost::math::lgamma(x);
}

double beta_fn(double x, double y) {
    require_positive(x, "beta_fn");
    require_positive(y, "beta_fn");
    return std::exp(log_gamma(x) + log_gamma(y) - log_gamma(x + y));
}

double digamma(double x) {
    require_positive(x, "digamma");
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // asymptotic series, Bernoulli numbers B_2k/(2k)
    const double r = 1.0 / (x * x);
    double tail = r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12.0))))));
    return acc + std::log(x) - 0.5 / x - tail;
}

double t0_residual(double t) {
    return 2.0 * t + t * (1.0 - t) * (digamma(1.0 + t) - digamma(1.0)) - 1.0;
}

double solve_t0() {
    double lo = 1e-6, hi = 0.5 - 1e-6;
    double flo = t0_residual(lo), fhi = t0_residual(hi);
    if (!(flo < 0.0 && fhi > 0.0)) throw NonConvergence("solve_t0: bracket does not straddle the root");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = t0_residual(mid);
        // the residual is strictly increasing, so an interior value must sit between the ends
        if (!(fm > flo && fm < fhi)) throw NonConvergence("solve_t0: residual not monotone on the bracket");
        if (std::abs(fm) < 1e-12 || hi - lo < 1e-15) return mid;
        if (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    return 0.5 * (lo + hi);
}

double l8_derivative(double kappa, L8Branch branch) {
    constexpr double pi = std::numbers::pi;
    if (branch == L8Branch::kappa_1_2) {
        if (!(kappa > 1.0 && kappa < 2.0)) throw DomainError("l8_derivative: kappa must lie in (1,2)");
        return (kappa - 1.0) * (3.0 - kappa) / 4.0 * pi * std::tan((2.0 - kappa) / 2.0 * pi) *
               beta_fn((1.0 + kappa) / 2.0, 2.0 - kappa);
    }
    if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("l8_derivative: kappa must lie in (0,1)");
    const double u = (1.0 - kappa) / 2.0 * pi;
    return (1.0 - kappa) / 2.0 * pi / std::tan(u) * beta_fn((1.0 + kappa) / 2.0, 1.0 - kappa);
}

double l13_objective(double kappa, double s) {
    if (!(kappa > 1.0 && kappa < 2.0)) throw DomainError("l13_objective: kappa must lie in (1,2)");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("l13_objective: s must lie in (0,1)");
    const double b = 2.0 - kappa;
    return (1.0 - s * (kappa - 1.0)) * beta_fn(s + kappa * (1.0 - s), b) / (1.0 - s) +
           (1.0 - (1.0 - s) * (kappa - 1.0)) * beta_fn(1.0 - s + kappa * s, b) / s;
}

}  // namespace ldb
