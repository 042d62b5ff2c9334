#pragma once

#include <functional>
#include <vector>

namespace ldb {

struct QuadOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-300;
    int max_depth = 15;
    // dyadic levels toward each end of every segment
    int endpoint_levels = 60;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

// Integral of f over [a, b] (finite). The segment is split at its midpoint and
// each half is cut into dyadic pieces shrinking toward the outer endpoint, so
// integrable power singularities at either end are resolved.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt = {});

// Same, over consecutive segments between sorted breakpoints.
QuadResult integrate(const std::function<double(double)>& f, const std::vector<double>& breakpoints,
                     const QuadOptions& opt = {});

}  // namespace ldb
