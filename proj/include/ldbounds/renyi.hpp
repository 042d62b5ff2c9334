#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ldbounds/extended.hpp"
#include "ldbounds/families.hpp"

namespace ldb {

struct FamilyPoint {
    DensityFamily family;
    double theta = 0.0;
};

// I^s(p||q) = -log int p^s q^(1-s), 0 < s < 1
Extended renyi_divergence(const FamilyPoint& p, const FamilyPoint& q, double s);
Extended renyi_divergence(const DensityFamily& f, double theta_p, double theta_q, double s);
// limits s -> 0 (which = 0): -log P_q(supp p);  s -> 1 (which = 1): -log P_p(supp q)
Extended renyi_endpoint(const FamilyPoint& p, const FamilyPoint& q, int which);

struct RenyiCurve {
    std::vector<double> s_grid;
    std::vector<double> values;
};

// s -> I^s(f_{theta-eps/2} || f_{theta+eps/2})
RenyiCurve renyi_curve(const DensityFamily& f, double theta, double eps, const std::vector<double>& s_grid);

enum class GTag { square, abs, sq_log, power, custom };

struct ScalingFunction {
    GTag tag = GTag::square;
    double power_kappa = 2.0;  // only for GTag::power
    std::function<double(double)> fn;  // only for GTag::custom
    std::string custom_name = "custom";

    double operator()(double eps) const;
    std::string name() const;

    static ScalingFunction square() { return make(GTag::square); }
    static ScalingFunction abs() { return make(GTag::abs); }
    static ScalingFunction sq_log() { return make(GTag::sq_log); }
    static ScalingFunction power(double kappa) { return make(GTag::power, kappa); }
    static ScalingFunction custom(std::function<double(double)> g, std::string name = "custom") {
        ScalingFunction s = make(GTag::custom, 0.0);
        s.fn = std::move(g);
        s.custom_name = std::move(name);
        return s;
    }

private:
    static ScalingFunction make(GTag t, double k = 2.0) {
        ScalingFunction s;
        s.tag = t;
        s.power_kappa = k;
        return s;
    }
};

ScalingFunction scaling_from_string(const std::string& tag, double kappa = 0.0);

// x^kappa = lim g(x eps)/g(eps)
double kappa_of_g(const ScalingFunction& g);

struct LimitEstimate {
    double value = 0.0;
    double uncertainty = 0.0;
    std::vector<double> ratios;  // I^s/g(eps) per rung
};

// 0.2 * 2^-k, k = 0..7, times the support width (or 1)
std::vector<double> default_eps_ladder(double width = 1.0);
std::vector<double> default_s_grid();

// limit of ratios[k] as eps -> 0, basis chosen by the scaling tag
LimitEstimate extrapolate_ladder(const std::vector<double>& eps, const std::vector<double>& ratios, GTag tag);

LimitEstimate scaled_limit(const DensityFamily& f, double theta, double s, const ScalingFunction& g,
                           const std::vector<double>& eps_ladder);

enum class Regime { regular, semi_regular, kappa_one, kappa_two, kappa_1_2, kappa_0_1 };

std::string to_string(Regime r);

struct RegimeInfo {
    Regime regime = Regime::regular;
    double kappa = 2.0;
    double A1 = 0.0;
    double A2 = 0.0;
    Extended J;
    ScalingFunction g;
};

RegimeInfo classify(const DensityFamily& f);

// closed-form I^s_g; s may be 0 or 1 to get the one-sided limits
double closed_form_isg(Regime regime, double A1, double A2, double kappa, double s,
                       double J = std::numeric_limits<double>::quiet_NaN());

struct ScalingProfile {
    ScalingFunction g;
    double kappa = 2.0;
    Regime regime = Regime::regular;
    double theta = 0.0;
    std::vector<double> s_grid;
    std::vector<double> isg;
    std::vector<double> uncertainty;
    double isg_at_0 = 0.0;
    double isg_at_1 = 0.0;
    double max_uncertainty = 0.0;
    // max over s of the last rung-to-rung change in I^s/g (ladder profiles)
    double uniformity = 0.0;
    bool closed_form = false;
    double A1 = 0.0, A2 = 0.0, J = std::numeric_limits<double>::quiet_NaN();
    std::function<double(double)> eval;
};

ScalingProfile closed_form_profile(Regime regime, double A1, double A2, double kappa,
                                   double J = std::numeric_limits<double>::quiet_NaN(),
                                   std::vector<double> s_grid = default_s_grid());
ScalingProfile closed_form_profile(const DensityFamily& f, std::vector<double> s_grid = default_s_grid());
ScalingProfile ladder_profile(const DensityFamily& f, double theta, const ScalingFunction& g,
                              const std::vector<double>& eps_ladder, std::vector<double> s_grid = default_s_grid());

}  // namespace ldb
