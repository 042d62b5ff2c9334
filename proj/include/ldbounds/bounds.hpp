#pragma once

#include <limits>

#include "ldbounds/renyi.hpp"

namespace ldb {

// s is optimised on [kSEdge, 1 - kSEdge]; one-sided limits are added separately
inline constexpr double kSEdge = 1e-4;

struct Optimum {
    double value = 0.0;
    double s_star = 0.5;
    bool at_boundary = false;
};

// 2^kappa sup_s I^s_g
Optimum alpha1_bar(const ScalingProfile& p);
// kappa < 1: sup, kappa = 1: 2 I^(1/2)_g, kappa > 1: inf of
// I^s_g/(s(1-s)) (s^(1/(kappa-1)) + (1-s)^(1/(kappa-1)))^(kappa-1)
Optimum alpha2_bar(const ScalingProfile& p);
double alpha2_objective(const ScalingProfile& p, double s);

struct Coincidence {
    bool coincide = false;
    bool eq163 = false;  // alpha1 = 2^kappa I^(1/2)_g
    bool eq15 = false;   // 2^kappa I^(1/2)_g = alpha2
    double tol = 0.0;
    // for kappa <= 1 coincide must be equivalent to eq163
    bool consistent = true;
};

Coincidence coincidence(const ScalingProfile& p, const Optimum& a1, const Optimum& a2);
Coincidence coincidence(const ScalingProfile& p);

struct BoundPair {
    double alpha1_bar = 0.0;
    double alpha2_bar = 0.0;
    double s_star1 = 0.5;
    double s_star2 = 0.5;
    bool boundary1 = false;
    bool boundary2 = false;
    double kappa = 0.0;
    bool coincide = false;
    bool symmetric_at_half = false;
    bool eq15 = false;
    double tol = 0.0;
    bool closed_alpha1 = false;  // value from a closed formula, not an optimiser
    bool closed_alpha2 = false;
    // 0 < kappa < 1 with A1 A2 != 0: whether alpha1_bar is attainable is not known
    bool attainability_open = false;
    double gap = 0.0;
};

BoundPair compute_bounds(const ScalingProfile& p);
BoundPair closed_form_bounds(Regime regime, double A1, double A2, double kappa,
                             double J = std::numeric_limits<double>::quiet_NaN());

}  // namespace ldb
