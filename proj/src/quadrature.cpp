#include "ldbounds/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ldbounds/errors.hpp"

namespace ldb {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// bisection on plain GK15 estimates; floor is an absolute error that is good enough,
// so a rounding-level jump at an end does not drive the recursion to full depth
QuadResult piece(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt, double floor,
                 int depth) {
    double err = 0.0;
    double v = GK::integrate(f, a, b, 0, 0.0, &err);
    err *= 0.5 * (b - a);  // boost reports the error on the reference interval [-1, 1]
    if (err <= std::max(opt.rel_tol * std::abs(v), floor) || depth <= 0 || !std::isfinite(v)) return {v, err};
    double m = 0.5 * (a + b);
    QuadResult l = piece(f, a, m, opt, 0.5 * floor, depth - 1);
    QuadResult r = piece(f, m, b, opt, 0.5 * floor, depth - 1);
    return {l.value + r.value, l.error + r.error};
}

// Wynn's epsilon algorithm on partial sums; returns the limit and a change estimate
std::pair<double, double> wynn(const std::vector<double>& sums) {
    const std::size_t m = sums.size();
    std::vector<double> prev(m + 1, 0.0), cur(sums.begin(), sums.end());
    double best = sums.back(), best_prev = sums[m - 2];
    for (std::size_t col = 1; cur.size() >= 2; ++col) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            double d = cur[i + 1] - cur[i];
            if (d == 0.0 || !std::isfinite(d)) return {best, std::abs(best - best_prev)};
            next[i] = prev[i + 1] + 1.0 / d;
        }
        prev = std::move(cur);
        cur = std::move(next);
        if (col % 2 == 0) {
            if (!std::isfinite(cur.back())) break;
            best_prev = cur.size() >= 2 ? cur[cur.size() - 2] : best;
            best = cur.back();
        }
    }
    return {best, std::abs(best - best_prev)};
}

// integral between edge and edge + h (h of either sign), cut at edge + h/2^k
QuadResult toward(const std::function<double(double)>& f, double edge, double h, const QuadOptions& opt) {
    QuadResult out;
    // below this width the cut points are no longer exact
    const double min_width = 1e6 * std::abs(std::nextafter(edge, edge + h) - edge);
    std::vector<double> sums;
    double last = 0.0;
    int quiet = 0;
    for (int k = 0; k < opt.endpoint_levels; ++k) {
        double outer = edge + h * std::ldexp(1.0, -k);
        double inner = edge + h * std::ldexp(1.0, -(k + 1));
        if (std::abs(outer - inner) < min_width || inner == outer || inner == edge) break;
        const double floor = std::max(opt.abs_tol, 1e-3 * opt.rel_tol * std::abs(out.value));
        QuadResult p = inner < outer ? piece(f, inner, outer, opt, floor, opt.max_depth)
                                     : piece(f, outer, inner, opt, floor, opt.max_depth);
        out.value += p.value;
        out.error += p.error;
        last = p.value;
        sums.push_back(out.value);
        if (std::abs(p.value) <= 1e-17 * std::abs(out.value) + opt.abs_tol) {
            if (++quiet >= 4) return out;
        } else {
            quiet = 0;
        }
    }
    // what is left beyond the deepest level: the pieces decay like a few geometric series
    if (sums.size() >= 3 && std::abs(last) > 1e-16 * std::abs(out.value)) {
        std::vector<double> tail(sums.end() - std::min<std::size_t>(sums.size(), 9), sums.end());
        auto [limit, change] = wynn(tail);
        if (std::isfinite(limit)) {
            out.error += change + std::abs(limit - out.value) * 1e-3;
            out.value = limit;
        }
    }
    return out;
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate: limits must be finite");
    if (a == b) return {};
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    const double h = 0.5 * (b - a);
    QuadResult left = toward(f, a, h, opt);
    QuadResult right = toward(f, b, -h, opt);
    return {sign * (left.value + right.value), left.error + right.error};
}

QuadResult integrate(const std::function<double(double)>& f, const std::vector<double>& breakpoints,
                     const QuadOptions& opt) {
    QuadResult out;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i])) continue;
        QuadResult r = integrate(f, breakpoints[i], breakpoints[i + 1], opt);
        out.value += r.value;
        out.error += r.error;
    }
    return out;
}

}  // namespace ldb
