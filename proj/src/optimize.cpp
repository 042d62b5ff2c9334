#include "ldbounds/optimize.hpp"

#include <cmath>

namespace ldb {

Extremum golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    return f1 >= f2 ? Extremum{x1, f1} : Extremum{x2, f2};
}

Extremum golden_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
    Extremum e = golden_max([&f](double x) { return -f(x); }, lo, hi, tol);
    return {e.x, -e.fx};
}

}  // namespace ldb
