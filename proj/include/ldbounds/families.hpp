#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ldbounds/extended.hpp"

namespace ldb {

enum class FamilyKind { uniform, beta, gamma, weibull, gaussian, triangular, custom };

std::string to_string(FamilyKind k);
FamilyKind family_kind_from_string(const std::string& s);

// f(x) ~ A1 (x-a)^(kappa1-1) near a, f(x) ~ A2 (b-x)^(kappa2-1) near b.
// Half-line supports carry kappa2 = +inf and A2 = 0.
struct EdgeBehavior {
    double kappa1 = 0.0;
    double A1 = 0.0;
    double kappa2 = 0.0;
    double A2 = 0.0;
};

// what the Renyi asymptotics see: the smaller exponent wins, the other end drops out
struct EffectiveEdge {
    double kappa = 0.0;
    double A1 = 0.0;
    double A2 = 0.0;
};

struct CustomDensity {
    std::string name = "custom";
    std::vector<double> params;  // recorded for reporting only
    std::function<double(double)> log_density;  // standardized, -inf outside (a, b)
    double a = 0.0;
    double b = 1.0;
    EdgeBehavior edge;
    bool regular = false;
    bool log_concave = false;
    bool monotone_decreasing = false;
    std::function<double(double)> score;     // optional, else central differences
    std::function<double(double)> cdf;       // optional, else quadrature
    std::function<double(double)> quantile;  // optional, else numeric inversion
};

struct SampleBatch {
    double theta = 0.0;
    std::vector<double> values;
    std::uint64_t seed = 0;
};

class DensityFamily {
public:
    FamilyKind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }
    const std::string& name() const { return name_; }
    double a() const { return a_; }
    double b() const { return b_; }
    bool bounded() const;
    bool regular() const { return regular_; }
    const EdgeBehavior& edge() const { return edge_; }
    EffectiveEdge effective_edge() const;
    bool log_concave() const { return log_concave_; }
    bool monotone_decreasing() const { return monotone_decreasing_; }

    double log_density(double theta, double x) const { return std_log_density(x - theta); }
    double density(double theta, double x) const;
    double score(double theta, double x) const;
    double cdf(double theta, double x) const;
    double quantile(double u) const;  // standardized

    // standardized draws; the hot path of the Monte Carlo driver
    void fill(std::mt19937_64& rng, std::span<double> out) const;
    SampleBatch sample(double theta, std::size_t n, std::uint64_t seed) const;

    // standardized window outside of which at most tail_mass probability lives on each side
    std::pair<double, double> effective_support(double tail_mass = 1e-16) const;

    double std_log_density(double y) const;
    double std_score(double y) const;

private:
    friend DensityFamily make_family(FamilyKind, std::vector<double>);
    friend DensityFamily make_custom(CustomDensity);

    FamilyKind kind_ = FamilyKind::uniform;
    std::vector<double> params_;
    std::string name_;
    double a_ = 0.0, b_ = 1.0;
    EdgeBehavior edge_;
    bool regular_ = false;
    bool log_concave_ = false;
    bool monotone_decreasing_ = false;
    double log_norm_ = 0.0;  // cached normalising constant
    std::shared_ptr<const CustomDensity> custom_;
};

DensityFamily make_family(FamilyKind kind, std::vector<double> params);
DensityFamily make_family(const std::string& kind, std::vector<double> params);
// asserted metadata is checked: normalisation, edge ratios, log-concavity claim
DensityFamily make_custom(CustomDensity spec);
// named custom densities usable from config files ("power": kappa x^(kappa-1) on (0,1))
DensityFamily make_registered(const std::string& name, const std::vector<double>& params);
std::vector<std::string> registered_names();

Extended fisher_information(const DensityFamily& f);

// uniform in (0,1), never 0 or 1
inline double open_unit(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace ldb
