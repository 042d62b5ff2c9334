#pragma once

#include <functional>

namespace ldb {

struct Extremum {
    double x = 0.0;
    double fx = 0.0;
};

// golden-section search for a unimodal function on [lo, hi]
Extremum golden_max(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);
Extremum golden_min(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);

}  // namespace ldb
