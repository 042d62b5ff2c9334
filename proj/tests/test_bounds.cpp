#include <doctest.h>

#include <cmath>
#include <random>

#include "ldbounds/bounds.hpp"
#include "ldbounds/special.hpp"

using namespace ldb;

namespace {

// I^s_g for 0<kappa<1, A2 = 0, with std::beta
double isg_01(double A1, double k, double s) { return (1 - k) / k * A1 * s * std::beta(s + k * (1 - s), 1 - k); }

double brute_sup(const std::function<double(double)>& f) {
    double best = -INFINITY;
    for (int i = 1; i < 200000; ++i) best = std::max(best, f(i / 200000.0));
    return best;
}

struct Config {
    Regime regime;
    double A1, A2, kappa, J;
};

Config random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Config c{Regime::regular, 0, 0, 2.0, NAN};
    switch (rng() % 5) {
        case 0: c.regime = Regime::regular; c.J = 0.1 + 5 * u(rng); return c;
        case 1: c.regime = Regime::kappa_one; c.kappa = 1.0; break;
        case 2: c.regime = Regime::kappa_two; c.kappa = 2.0; break;
        case 3: c.regime = Regime::kappa_1_2; c.kappa = 1.02 + 0.96 * u(rng); break;
        default: c.regime = Regime::kappa_0_1; c.kappa = 0.05 + 0.9 * u(rng); break;
    }
    c.A1 = 3 * u(rng);
    c.A2 = rng() % 4 == 0 ? 0.0 : 3 * u(rng);
    if (rng() % 5 == 0) c.A2 = c.A1;
    if (c.A1 == 0.0 && c.A2 == 0.0) c.A1 = 1.0;
    return c;
}

}  // namespace

TEST_CASE("alpha1_bar examples") {
    auto u = closed_form_profile(Regime::kappa_one, 1.0, 1.0, 1.0);
    auto a = alpha1_bar(u);
    CHECK(a.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(a.s_star == 0.5);

    auto g = closed_form_profile(Regime::regular, 0, 0, 2.0, 1.0);
    a = alpha1_bar(g);
    CHECK(a.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(a.s_star == doctest::Approx(0.5).epsilon(1e-6));

    auto k1 = closed_form_profile(Regime::kappa_one, 2.0, 1.0, 1.0);
    a = alpha1_bar(k1);
    CHECK(a.value == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(a.at_boundary);
    CHECK(a.s_star == doctest::Approx(1.0 - kSEdge));
}

TEST_CASE("alpha2_bar examples") {
    CHECK(alpha2_bar(closed_form_profile(Regime::kappa_one, 1.0, 1.0, 1.0)).value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(alpha2_bar(closed_form_profile(Regime::regular, 0, 0, 2.0, 1.0)).value == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(alpha2_bar(closed_form_profile(Regime::kappa_one, 2.0, 1.0, 1.0)).value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("coincidence examples") {
    auto c = coincidence(closed_form_profile(Regime::kappa_one, 1.5, 1.5, 1.0));
    CHECK(c.coincide);
    CHECK(c.eq163);
    CHECK(c.eq15);
    c = coincidence(closed_form_profile(Regime::kappa_one, 2.0, 1.0, 1.0));
    CHECK_FALSE(c.coincide);
    CHECK(c.consistent);
    c = coincidence(closed_form_profile(Regime::regular, 0, 0, 2.0, 1.0));
    CHECK(c.coincide);
    CHECK(c.eq163);
    CHECK(c.eq15);
}

TEST_CASE("closed_form_bounds examples") {
    auto b = closed_form_bounds(Regime::kappa_two, 3.0, 3.0, 2.0);
    CHECK(b.alpha1_bar == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(b.alpha2_bar == doctest::Approx(3.0).epsilon(1e-14));

    b = closed_form_bounds(Regime::kappa_1_2, 1.0, 1.0, 1.5);
    const double sym = std::sqrt(2.0) * 1.5 * std::beta(1.25, 0.5) / 1.5;
    CHECK(b.alpha1_bar == doctest::Approx(sym).epsilon(1e-12));
    CHECK(b.alpha2_bar == doctest::Approx(sym).epsilon(1e-12));
    CHECK(b.coincide);

    b = closed_form_bounds(Regime::kappa_0_1, 1.0, 0.0, 0.5);
    CHECK(b.alpha1_bar == doctest::Approx(std::sqrt(2.0) / 0.5).epsilon(1e-12));
    // alpha2_bar is the sup of the objective; it peaks inside (0,1), above A1/kappa = 2
    auto obj = [](double s) {
        return isg_01(1.0, 0.5, s) / (s * (1 - s)) * std::pow(std::pow(s, -2.0) + std::pow(1 - s, -2.0), -0.5);
    };
    const double oracle = brute_sup(obj);
    CHECK(b.alpha2_bar == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(b.alpha2_bar > 2.0 * 1.02);
    CHECK(b.s_star2 > 0.5);
    CHECK(b.s_star2 < 0.95);

    b = closed_form_bounds(Regime::regular, 0, 0, 2.0, 3.0);
    CHECK(b.alpha1_bar == 1.5);
    CHECK(b.alpha2_bar == 1.5);
}

TEST_CASE("A2 = 0 with 1 < kappa < 2 - t0") {
    const double t0 = solve_t0();
    for (double k : {1.1, 1.2, 1.4, 1.5, 1.56}) {
        REQUIRE(k < 2 - t0);
        auto p = closed_form_profile(Regime::kappa_1_2, k, 0.0, k);
        double prev = -INFINITY;
        for (int i = 1; i < 1000; ++i) {
            double v = p.eval(i / 1000.0);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
        auto b = closed_form_bounds(Regime::kappa_1_2, k, 0.0, k);
        CHECK(b.alpha1_bar == doctest::Approx(std::pow(2.0, k)).epsilon(1e-12));
        CHECK(b.boundary1);
    }
}

TEST_CASE("alpha1_bar >= alpha2_bar and the kappa <= 1 equivalence on random configs") {
    std::mt19937_64 rng(2024);
    int kappa_le1 = 0;
    for (int i = 0; i < 200; ++i) {
        Config c = random_config(rng);
        CAPTURE(to_string(c.regime));
        CAPTURE(c.A1);
        CAPTURE(c.A2);
        CAPTURE(c.kappa);
        auto b = closed_form_bounds(c.regime, c.A1, c.A2, c.kappa, c.J);
        CHECK(b.alpha1_bar >= b.alpha2_bar - 1e-9 * b.alpha1_bar);
        auto p = closed_form_profile(c.regime, c.A1, c.A2, c.kappa, c.J);
        auto co = coincidence(p);
        if (p.kappa <= 1.0) {
            ++kappa_le1;
            CHECK(co.coincide == co.eq163);
            CHECK(co.consistent);
        }
        // the s = 1/2 evaluation sits between the two objectives' optima
        double mid = std::pow(2.0, p.kappa) * p.eval(0.5);
        auto a2 = alpha2_bar(p);
        if (p.kappa > 1.0) CHECK(a2.value <= mid * (1 + 1e-9));
        if (p.kappa < 1.0) CHECK(a2.value >= mid * (1 - 1e-9));
    }
    CHECK(kappa_le1 > 40);
}

TEST_CASE("numeric optimisers agree with the closed formulas") {
    std::mt19937_64 rng(77);
    int compared = 0;
    for (int i = 0; i < 200; ++i) {
        Config c = random_config(rng);
        auto closed = closed_form_bounds(c.regime, c.A1, c.A2, c.kappa, c.J);
        auto numeric = compute_bounds(closed_form_profile(c.regime, c.A1, c.A2, c.kappa, c.J));
        CAPTURE(to_string(c.regime));
        CAPTURE(c.A1);
        CAPTURE(c.A2);
        CAPTURE(c.kappa);
        if (closed.closed_alpha1) {
            CHECK(numeric.alpha1_bar == doctest::Approx(closed.alpha1_bar).epsilon(1e-6));
            ++compared;
        }
        if (closed.closed_alpha2) CHECK(numeric.alpha2_bar == doctest::Approx(closed.alpha2_bar).epsilon(1e-6));
    }
    CHECK(compared > 60);
}

TEST_CASE("symmetric 1<kappa<2: alpha2 objective minimised at one half") {
    for (double k : {1.2, 1.5, 1.8}) {
        auto p = closed_form_profile(Regime::kappa_1_2, 1.3, 1.3, k);
        auto a2 = alpha2_bar(p);
        CHECK(std::abs(a2.s_star - 0.5) <= 1e-3);
        double best = INFINITY, arg = 0;
        for (int i = 1; i < 10000; ++i) {
            double v = alpha2_objective(p, i / 10000.0);
            if (v < best) {
                best = v;
                arg = i / 10000.0;
            }
        }
        CHECK(std::abs(arg - 0.5) <= 1e-3);
    }
}

TEST_CASE("ladder profiles match the closed forms") {
    for (double k : {1.2, 1.5}) {
        auto f = make_family("weibull", {k});
        auto lp = compute_bounds(ladder_profile(f, 0.0, ScalingFunction::power(k), default_eps_ladder()));
        auto cb = closed_form_bounds(Regime::kappa_1_2, k, 0.0, k);
        CHECK(lp.alpha1_bar == doctest::Approx(cb.alpha1_bar).epsilon(0.02));
        CHECK(lp.alpha2_bar == doctest::Approx(cb.alpha2_bar).epsilon(0.02));
    }
    auto u = compute_bounds(ladder_profile(make_family("uniform", {0.0, 1.0}), 0.0, ScalingFunction::abs(),
                                           default_eps_ladder()));
    CHECK(u.alpha1_bar == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(u.coincide);
}

TEST_CASE("open attainability is flagged") {
    auto b = compute_bounds(closed_form_profile(Regime::kappa_0_1, 1.0, 2.0, 0.5));
    CHECK(b.attainability_open);
    CHECK(b.gap == doctest::Approx(b.alpha1_bar - b.alpha2_bar));
    CHECK_FALSE(compute_bounds(closed_form_profile(Regime::kappa_0_1, 1.0, 0.0, 0.5)).attainability_open);
}
