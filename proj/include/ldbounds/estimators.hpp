#pragma once

#include <functional>
#include <span>
#include <string>

#include "ldbounds/families.hpp"

namespace ldb {

enum class EstimatorKind { mle, lr, min_shift, max_shift, shifted_min, convex_combo };

std::string to_string(EstimatorKind k);
EstimatorKind estimator_kind_from_string(const std::string& s);

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::mle;
    double eps = 0.0;     // lr, shifted_min
    double lambda = 0.5;  // convex_combo

    static EstimatorSpec mle() { return {EstimatorKind::mle}; }
    static EstimatorSpec lr(double eps) { return {EstimatorKind::lr, eps}; }
    static EstimatorSpec min_shift() { return {EstimatorKind::min_shift}; }
    static EstimatorSpec max_shift() { return {EstimatorKind::max_shift}; }
    static EstimatorSpec shifted_min(double eps) { return {EstimatorKind::shifted_min, eps}; }
    static EstimatorSpec convex_combo(double lambda) { return {EstimatorKind::convex_combo, 0.0, lambda}; }

    std::string name() const;
    bool eps_dependent() const { return kind == EstimatorKind::lr || kind == EstimatorKind::shifted_min; }
    bool order_statistic() const { return kind != EstimatorKind::mle && kind != EstimatorKind::lr; }
};

// throws UnsupportedFamily / InvalidParameter when the estimator cannot be used with f
void validate(const EstimatorSpec& spec, const DensityFamily& f);

double estimate(const EstimatorSpec& spec, const DensityFamily& f, std::span<const double> batch);

// For k nondecreasing on (lo, hi), read as -inf left of lo and +inf right of hi:
// the midpoint of sup{z : k(z) < 0} and inf{z : k(z) > 0}, resolved to res relative.
double monotone_midpoint(const std::function<double(double)>& k, double lo, double hi, double res = 1e-13);

}  // namespace ldb
