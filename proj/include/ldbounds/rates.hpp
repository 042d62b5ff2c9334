#pragma once

#include <cstdint>
#include <vector>

#include "ldbounds/estimators.hpp"
#include "ldbounds/extended.hpp"
#include "ldbounds/regression.hpp"
#include "ldbounds/renyi.hpp"

namespace ldb {

struct MCParams {
    std::vector<int> n_grid;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    TailModel model = TailModel::automatic;
    unsigned threads = 0;  // 0: hardware concurrency
};

// per-trial seed; everything downstream of it is order independent
std::uint64_t trial_seed(std::uint64_t root, std::uint64_t n, std::uint64_t trial);

struct TailRateEstimate {
    Extended beta_plus;
    Extended beta_minus;
    Extended beta;
    double slope_stderr = 0.0;  // of the side that gives beta
    double stderr_plus = 0.0;
    double stderr_minus = 0.0;
    std::vector<int> n_grid;         // simulated sizes (early stop may cut the requested grid)
    std::vector<double> p_hats;      // two-sided miss frequency per n
    std::vector<double> p_plus;      // P(T > theta + eps)
    std::vector<double> p_minus;     // P(T < theta - eps)
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    TailFit fit_plus, fit_minus;
};

TailRateEstimate mc_tail_rate(const DensityFamily& f, const EstimatorSpec& spec, double theta, double eps,
                              const MCParams& mc);

enum class Side { plus, minus };

double mle_chernoff_rate(const DensityFamily& f, double eps, Side side);

struct OrderStatRates {
    Extended lower_plus, lower_minus;      // min_shift
    Extended upper_plus, upper_minus;      // max_shift
    Extended combo_plus, combo_minus;      // convex_combo(lambda)
    Extended shifted_plus, shifted_minus;  // shifted_min(eps)
    double lambda = 0.5;
};

OrderStatRates order_stat_rates(const DensityFamily& f, double eps, double lambda = 0.5);

// closed-form (beta+, beta-) for the estimator where one exists
bool analytic_rates(const DensityFamily& f, const EstimatorSpec& spec, double eps, Extended& plus, Extended& minus);

struct ChernoffResult {
    Extended value;
    double s_star = 0.5;
};

ChernoffResult chernoff_test_rate(const FamilyPoint& p, const FamilyPoint& q);

struct HoeffdingResult {
    Extended value;
    double s_star = 0.5;
    bool at_boundary = false;  // sup approached as s -> 1
    bool clamped = false;      // negative value floored at 0
};

HoeffdingResult hoeffding_rate(const FamilyPoint& p, const FamilyPoint& q, double r);

struct LrIdentity {
    Extended lhs;
    Extended rhs;
    double lhs_stderr = 0.0;
    bool disjoint = false;
    TailRateEstimate at_upper;  // simulated at theta + eps, gives beta-
    TailRateEstimate at_lower;  // simulated at theta - eps, gives beta+
};

LrIdentity lr_rate_identity(const DensityFamily& f, double theta, double eps, const MCParams& mc);

struct HtResult {
    double slope = 0.0;
    double stderr_ = 0.0;
    std::vector<int> n_grid;
    std::vector<double> e1, e2;  // first / second kind error frequencies
    TailFit fit;
};

HtResult ht_simulate(const FamilyPoint& p, const FamilyPoint& q, const MCParams& mc);

struct Alpha2Estimate {
    double value = 0.0;  // final rung
    double trend = 0.0;  // last minus previous rung
    std::vector<double> eps;
    std::vector<double> ratios;  // inf over the window of beta, divided by g(eps)
    std::vector<double> ratio_stderr;
    bool window_consistent = true;
};

// n_grid in mc is for the last rung; coarser rungs get it scaled by g(eps_last)/g(eps)
Alpha2Estimate alpha2_estimate(const DensityFamily& f, const EstimatorSpec& spec, double theta,
                               const ScalingFunction& g, const std::vector<double>& eps_ladder, const MCParams& mc);

}  // namespace ldb
