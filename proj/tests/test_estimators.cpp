#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ldbounds/errors.hpp"
#include "ldbounds/estimators.hpp"

using namespace ldb;

namespace {

std::vector<double> shifted(std::vector<double> x, double c) {
    for (double& v : x) v += c;
    return x;
}

// gamma(2) location MLE: n = sum 1/(x_i - theta), by plain bisection
double gamma2_mle(const std::vector<double>& x) {
    double hi = *std::min_element(x.begin(), x.end());
    double lo = hi - 100.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi), s = 0.0;
        for (double v : x) s += 1.0 / (v - mid);
        (s > x.size() ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("order statistic examples on uniform[0,1]") {
    auto u = make_family("uniform", {0.0, 1.0});
    std::vector<double> x = {0.5, 0.2, 0.9};
    CHECK(estimate(EstimatorSpec::min_shift(), u, x) == doctest::Approx(0.2));
    CHECK(estimate(EstimatorSpec::max_shift(), u, x) == doctest::Approx(-0.1));
    CHECK(estimate(EstimatorSpec::convex_combo(0.5), u, x) == doctest::Approx(0.05));
    CHECK(estimate(EstimatorSpec::shifted_min(0.05), u, x) == doctest::Approx(0.15));
}

TEST_CASE("gaussian mle is the sample mean") {
    auto g = make_family("gaussian", {1.0});
    auto b = g.sample(1.7, 500, 3);
    double mean = std::accumulate(b.values.begin(), b.values.end(), 0.0) / b.values.size();
    CHECK(std::abs(estimate(EstimatorSpec::mle(), g, b.values) - mean) < 1e-10);
}

TEST_CASE("gamma(2) mle against bisection") {
    auto f = make_family("gamma", {2.0});
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto b = f.sample(0.4, 50, seed);
        CHECK(estimate(EstimatorSpec::mle(), f, b.values) == doctest::Approx(gamma2_mle(b.values)).epsilon(1e-10));
    }
}

TEST_CASE("exponential mle is the minimum") {
    auto f = make_family("gamma", {1.0});
    auto b = f.sample(-2.0, 40, 9);
    CHECK(estimate(EstimatorSpec::mle(), f, b.values) == estimate(EstimatorSpec::min_shift(), f, b.values));
}

TEST_CASE("shift equivariance") {
    std::vector<std::pair<DensityFamily, EstimatorSpec>> cases = {
        {make_family("gaussian", {1.0}), EstimatorSpec::mle()},
        {make_family("beta", {2.0, 2.0}), EstimatorSpec::mle()},
        {make_family("beta", {3.0, 3.0}), EstimatorSpec::lr(0.05)},
        {make_family("gaussian", {2.0}), EstimatorSpec::lr(0.3)},
        {make_family("uniform", {0.0, 1.0}), EstimatorSpec::convex_combo(0.3)},
        {make_family("weibull", {1.5}), EstimatorSpec::shifted_min(0.1)},
        {make_family("triangular", {0.3}), EstimatorSpec::max_shift()},
    };
    for (const auto& [f, spec] : cases) {
        CAPTURE(f.name());
        CAPTURE(spec.name());
        auto x = f.sample(0.0, 64, 21).values;
        double base = estimate(spec, f, x);
        for (double c : {0.37, -1.5, 4.0}) CHECK(std::abs(estimate(spec, f, shifted(x, c)) - base - c) < 1e-12 * (1 + std::abs(c)));
    }
}

TEST_CASE("estimates respect the support constraints") {
    for (auto f : {make_family("uniform", {0.0, 1.0}), make_family("beta", {2.0, 2.0}), make_family("beta", {3.0, 1.5}),
                   make_family("triangular", {0.7})}) {
        CAPTURE(f.name());
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto x = f.sample(0.25, 30, seed).values;
            double lo = estimate(EstimatorSpec::max_shift(), f, x), hi = estimate(EstimatorSpec::min_shift(), f, x);
            CHECK(hi >= 0.25);
            CHECK(lo <= 0.25);
            if (f.log_concave()) {
                double m = estimate(EstimatorSpec::mle(), f, x);
                CHECK(m >= lo);
                CHECK(m <= hi);
                double l = estimate(EstimatorSpec::lr(0.02), f, x);
                CHECK(l >= lo - 1e-12);
                CHECK(l <= hi + 1e-12);
            }
        }
    }
}

TEST_CASE("lr on gaussian is the mean") {
    // log p(x-z+e) - log p(x-z-e) is linear in z, root at the mean
    auto g = make_family("gaussian", {1.0});
    auto x = g.sample(0.0, 80, 4).values;
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    CHECK(estimate(EstimatorSpec::lr(0.2), g, x) == doctest::Approx(mean).epsilon(1e-10));
}

TEST_CASE("unsupported combinations are rejected") {
    auto g = make_family("gaussian", {1.0});
    std::vector<double> x = {0.1, 0.2};
    CHECK_THROWS_AS(estimate(EstimatorSpec::min_shift(), g, x), UnsupportedFamily);
    CHECK_THROWS_AS(estimate(EstimatorSpec::convex_combo(0.5), make_family("gamma", {2.0}), x), UnsupportedFamily);
    CHECK_THROWS_AS(validate(EstimatorSpec::mle(), make_family("beta", {0.5, 0.5})), UnsupportedFamily);
    CHECK_THROWS_AS(validate(EstimatorSpec::lr(0.0), g), InvalidParameter);
    CHECK_THROWS_AS(validate(EstimatorSpec::convex_combo(1.0), make_family("uniform", {0.0, 1.0})), InvalidParameter);
    CHECK_THROWS_AS(estimate(EstimatorSpec::mle(), g, std::vector<double>{}), InvalidParameter);
    CHECK(estimator_kind_from_string("shifted_min") == EstimatorKind::shifted_min);
    CHECK_THROWS_AS(estimator_kind_from_string("median"), InvalidParameter);
}

TEST_CASE("monotone_midpoint") {
    CHECK(monotone_midpoint([](double z) { return z - 0.3; }, -1.0, 1.0) == doctest::Approx(0.3).epsilon(1e-12));
    auto step = [](double z) { return z < 0.4 ? -1.0 : (z > 0.6 ? 1.0 : 0.0); };
    CHECK(monotone_midpoint(step, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(monotone_midpoint([](double z) { return z - 7.0; }, -INFINITY, INFINITY) == doctest::Approx(7.0).epsilon(1e-12));
}
