#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace ldb {

struct LemmaResult {
    std::string name;
    bool pass = false;
    double slack = 0.0;  // distance to the tolerance, >= 0 on a pass
    std::string detail;
};

enum class Level { quick, full };

Level level_from_string(const std::string& s);

// I1 = int_0^delta [exp(-eps/x)(x+eps) - x] dx,  I2 = int_eps^delta [exp(eps/x)(x-eps) - x] dx
std::pair<double, double> l11_integrals(double eps, double delta = 0.5);
// I1, I2 divided by eps^2 log eps
std::pair<double, double> l11_ratios(double eps, double delta = 0.5);
// limit of the ratios as eps -> 0 from L + c/log eps + d/log^2 eps through three eps values
std::pair<double, double> l11_extrapolated(const std::vector<double>& eps = {1e-4, 1e-6, 1e-8}, double delta = 0.5);

// random concave piecewise-linear f >= 0 on (0,1), as the min of affine pieces
struct ConcavePL {
    std::vector<double> intercept, slope;
    double operator()(double t) const;
    std::vector<double> knots() const;
};
ConcavePL random_concave(std::uint64_t seed, int pieces = 4);
// inf_{x >= 0} sup_{0<t<1} ((s-t)x + (1-s)f(t))/(1-t) by grid search plus ternary refinement
double inf_sup_brute(const ConcavePL& f, double s, int x_grid = 10000, int t_grid = 1000);

LemmaResult check_sandwich(int cases, std::uint64_t seed);
LemmaResult check_l8();
LemmaResult check_l11_literal(double eps = 1e-4);
LemmaResult check_l11_limit();
LemmaResult check_l12();
LemmaResult check_l13();
LemmaResult check_inf_sup(int functions, std::uint64_t seed);
LemmaResult check_kappa_of_g();

std::vector<LemmaResult> run_lemma_suite(Level level, std::uint64_t seed = 20240601);

}  // namespace ldb
