#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ldbounds/errors.hpp"
#include "ldbounds/optimize.hpp"
#include "ldbounds/quadrature.hpp"

using namespace ldb;

TEST_CASE("smooth integrands") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 3.0).value == doctest::Approx(9.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::exp(-0.5 * x * x); }, -12.0, 12.0).value ==
          doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, std::numbers::pi, 0.0).value ==
          doctest::Approx(-2.0).epsilon(1e-13));
}

TEST_CASE("endpoint singularities") {
    CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0).value == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(integrate([](double x) { return std::log(x); }, 0.0, 1.0).value == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(integrate([](double x) { return std::pow(1.0 - x, -0.9); }, 0.0, 1.0).value ==
          doctest::Approx(10.0).epsilon(1e-8));
    // both ends singular
    CHECK(integrate([](double x) { return 1.0 / std::sqrt(x * (1.0 - x)); }, 0.0, 1.0).value ==
          doctest::Approx(std::numbers::pi).epsilon(1e-9));
}

TEST_CASE("short interval away from zero") {
    CHECK(integrate([](double x) { return 1.0 / x; }, 1e-6, 4e-6).value == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("breakpoints and limits") {
    auto f = [](double x) { return std::abs(x - 0.3); };
    CHECK(integrate(f, std::vector<double>{0.0, 0.3, 1.0}).value == doctest::Approx(0.045 + 0.245).epsilon(1e-13));
    CHECK(integrate(f, 0.5, 0.5).value == 0.0);
    CHECK_THROWS_AS(integrate(f, 0.0, INFINITY), DomainError);
}

TEST_CASE("golden section") {
    auto m = golden_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0);
    CHECK(m.x == doctest::Approx(0.3).epsilon(1e-8));
    auto n = golden_min([](double x) { return std::cosh(x - 2.0); }, -5.0, 5.0);
    CHECK(n.x == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(n.fx == doctest::Approx(1.0).epsilon(1e-14));
}
