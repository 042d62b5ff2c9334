#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ldbounds/errors.hpp"
#include "ldbounds/families.hpp"
#include "ldbounds/quadrature.hpp"

using namespace ldb;

namespace {

std::vector<DensityFamily> builtins() {
    return {make_family(FamilyKind::uniform, {0.0, 1.0}), make_family(FamilyKind::uniform, {-1.0, 2.0}),
            make_family(FamilyKind::beta, {2.0, 2.0}),    make_family(FamilyKind::beta, {0.5, 0.5}),
            make_family(FamilyKind::beta, {3.0, 1.5}),    make_family(FamilyKind::gamma, {2.0, 1.0}),
            make_family(FamilyKind::gamma, {0.7, 1.0}),   make_family(FamilyKind::weibull, {1.5, 1.0}),
            make_family(FamilyKind::weibull, {0.8, 2.0}), make_family(FamilyKind::gaussian, {1.0}),
            make_family(FamilyKind::triangular, {0.3}),   make_registered("power", {0.5})};
}

double width_or_one(const DensityFamily& f) { return f.bounded() ? f.b() - f.a() : 1.0; }

}  // namespace

TEST_CASE("edge metadata of the built-in families") {
    auto u = make_family(FamilyKind::uniform, {0.0, 1.0});
    CHECK(u.edge().kappa1 == 1.0);
    CHECK(u.edge().kappa2 == 1.0);
    CHECK(u.edge().A1 == 1.0);
    CHECK(u.edge().A2 == 1.0);

    auto b = make_family("beta", {2.0, 2.0});
    CHECK(b.edge().kappa1 == 2.0);
    CHECK(b.edge().kappa2 == 2.0);
    CHECK(b.edge().A1 == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(b.edge().A2 == doctest::Approx(6.0).epsilon(1e-13));

    auto w = make_family("weibull", {1.5});
    CHECK(w.edge().kappa1 == 1.5);
    CHECK(w.edge().A1 == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(w.edge().A2 == 0.0);

    auto g = make_family("gamma", {2.5});
    CHECK(g.edge().A1 == doctest::Approx(1.0 / std::tgamma(2.5)).epsilon(1e-12));
    CHECK(g.edge().A2 == 0.0);

    CHECK(make_family("gaussian", {1.0}).regular());
    CHECK_THROWS_AS(make_family("beta", {-1.0, 2.0}), InvalidParameter);
    CHECK_THROWS_AS(make_family("uniform", {1.0, 1.0}), InvalidParameter);
    CHECK_THROWS_AS(make_family("cauchy", {}), InvalidParameter);
}

TEST_CASE("log_density examples") {
    auto u = make_family(FamilyKind::uniform, {0.0, 1.0});
    CHECK(u.log_density(0.0, 0.5) == 0.0);
    CHECK(u.log_density(0.0, 1.5) == -INFINITY);
    auto g = make_family(FamilyKind::gaussian, {1.0});
    CHECK(g.log_density(0.0, 0.0) == doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-15));
}

TEST_CASE("score examples") {
    CHECK(make_family("gaussian", {1.0}).score(0.0, 0.3) == doctest::Approx(-0.3).epsilon(1e-13));
    CHECK(std::abs(make_family("beta", {2.0, 2.0}).score(0.0, 0.5)) < 1e-12);
    CHECK(make_family("weibull", {1.5}).score(0.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(make_family("beta", {2.0, 2.0}).score(0.0, 1.0), DomainError);
}

TEST_CASE("normalisation, shift covariance, edge ratios") {
    for (const auto& f : builtins()) {
        CAPTURE(f.name());
        auto [lo, hi] = f.effective_support();
        auto r = integrate([&](double y) { return std::exp(f.std_log_density(y)); }, lo, hi);
        CHECK(std::abs(r.value - 1.0) < 1e-8);

        for (double x : {-0.7, 0.1, 0.45, 0.9, 2.3})
            for (double th : {-1.25, 0.0, 3.5}) CHECK(f.log_density(th, x) == f.log_density(0.0, x - th));

        if (f.regular()) continue;
        const double h = 1e-4 * width_or_one(f);
        const auto& e = f.edge();
        if (e.A1 > 0.0) {
            double ratio = std::exp(f.std_log_density(f.a() + h)) / (e.A1 * std::pow(h, e.kappa1 - 1.0));
            CHECK(ratio >= 0.9);
            CHECK(ratio <= 1.1);
        }
        if (e.A2 > 0.0) {
            double ratio = std::exp(f.std_log_density(f.b() - h)) / (e.A2 * std::pow(h, e.kappa2 - 1.0));
            CHECK(ratio >= 0.9);
            CHECK(ratio <= 1.1);
        }
    }
}

TEST_CASE("log-concave flag matches second differences") {
    for (const auto& f : builtins()) {
        CAPTURE(f.name());
        if (!f.log_concave()) continue;
        auto [lo, hi] = f.effective_support(1e-10);
        const int m = 2000;
        const double step = (hi - lo) / m;
        double worst = -INFINITY;
        for (int i = 1; i < m - 1; ++i) {
            double y = lo + step * i;
            double d2 = f.std_log_density(y + step) - 2 * f.std_log_density(y) + f.std_log_density(y - step);
            if (std::isfinite(d2)) worst = std::max(worst, d2);
        }
        CHECK(worst <= 1e-9);
    }
    CHECK_FALSE(make_family("beta", {0.5, 0.5}).log_concave());
    CHECK_FALSE(make_family("weibull", {0.8}).log_concave());
}

TEST_CASE("sampling: support, determinism, moments") {
    auto u = make_family(FamilyKind::uniform, {0.0, 1.0});
    auto batch = u.sample(2.0, 3, 7);
    CHECK(batch.values.size() == 3);
    for (double v : batch.values) {
        CHECK(v > 2.0);
        CHECK(v < 3.0);
    }
    auto w = make_family(FamilyKind::weibull, {1.5});
    auto a = w.sample(0.0, 10000, 99), b = w.sample(0.0, 10000, 99);
    CHECK(a.values == b.values);
    double mean = 0.0;
    for (double v : a.values) mean += v;
    mean /= a.values.size();
    const double mu = std::tgamma(1.0 + 2.0 / 3.0);
    const double sd = std::sqrt(std::tgamma(1.0 + 4.0 / 3.0) - mu * mu);
    CHECK(std::abs(mean - mu) < 3.0 * sd / std::sqrt(10000.0));
}

TEST_CASE("sampling: Kolmogorov-Smirnov against the CDF") {
    const std::size_t n = 100000;
    const double critical = 1.628 / std::sqrt(static_cast<double>(n));  // 1% level
    std::uint64_t seed = 1;
    for (const auto& f : builtins()) {
        CAPTURE(f.name());
        auto s = f.sample(0.0, n, seed++).values;
        std::sort(s.begin(), s.end());
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double c = f.cdf(0.0, s[i]);
            d = std::max({d, c - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - c});
        }
        CHECK(d < critical);
    }
}

TEST_CASE("cdf and quantile are inverse") {
    for (const auto& f : builtins()) {
        CAPTURE(f.name());
        for (double u : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999}) CHECK(f.cdf(0.0, f.quantile(u)) == doctest::Approx(u).epsilon(1e-8));
    }
}

TEST_CASE("fisher information") {
    CHECK(fisher_information(make_family("gaussian", {1.0})).value() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(fisher_information(make_family("gaussian", {2.0})).value() == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(fisher_information(make_family("uniform", {0.0, 1.0})).is_infinite());
    CHECK(fisher_information(make_family("beta", {2.0, 2.0})).is_infinite());
    // beta(3,3): score 2/y - 2/(1-y), so J = 4 E[y^-2] - 8 E[1/(y(1-y))] + 4 E[(1-y)^-2] = 40 - 40 + 40
    CHECK(fisher_information(make_family("beta", {3.0, 3.0})).value() == doctest::Approx(40.0).epsilon(1e-6));
}

TEST_CASE("custom densities are validated") {
    auto p = make_registered("power", {0.5});
    CHECK(p.kind() == FamilyKind::custom);
    CHECK(p.edge().kappa1 == 0.5);
    CHECK(p.edge().A1 == 0.5);
    // f(1) = kappa, a kappa = 1 edge, which the smaller exponent at 0 hides
    CHECK(p.edge().kappa2 == 1.0);
    CHECK(p.effective_edge().kappa == 0.5);
    CHECK(p.effective_edge().A2 == 0.0);
    CHECK_THROWS_AS(make_registered("power", {-1.0}), InvalidParameter);
    CHECK_THROWS_AS(make_registered("nope", {}), InvalidParameter);

    CustomDensity c;
    c.name = "ramp";
    c.a = 0.0;
    c.b = 1.0;
    c.log_density = [](double y) { return std::log(2.0 * y); };
    c.edge = {2.0, 2.0, 1.0, 2.0};
    CHECK_NOTHROW(make_custom(c));
    c.edge.A1 = 5.0;  // wrong asserted constant
    CHECK_THROWS_AS(make_custom(c), InvalidParameter);
    c.edge.A1 = 2.0;
    c.log_density = [](double y) { return std::log(3.0 * y); };  // not normalised
    CHECK_THROWS_AS(make_custom(c), InvalidParameter);
}
