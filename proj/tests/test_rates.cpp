#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ldbounds/errors.hpp"
#include "ldbounds/rates.hpp"

using namespace ldb;

namespace {

std::vector<int> grid(int step, int top, int first = 0) {
    std::vector<int> g;
    for (int n = first ? first : step; n <= top; n += step) g.push_back(n);
    return g;
}

MCParams params(std::vector<int> n_grid, std::uint64_t trials, std::uint64_t seed = 11) {
    MCParams mc;
    mc.n_grid = std::move(n_grid);
    mc.trials = trials;
    mc.seed = seed;
    mc.threads = 1;
    return mc;
}

// plus side of the beta(3,3) mle rate: sup_t -log int_eps^1 exp(-t score(x - eps)) f(x) dx
double beta33_mle_plus(double eps) {
    auto phi = [eps](double t) {
        const int m = 200000;
        const double h = (1.0 - eps) / m;
        double acc = 0.0;
        for (int i = 0; i <= m; ++i) {
            double x = eps + h * i, y = x - eps;
            double f = 30 * x * x * (1 - x) * (1 - x);
            double v = y <= 0.0 ? 0.0 : f * std::exp(-t * (2 / y - 2 / (1 - y)));
            acc += (i == 0 || i == m) ? 0.5 * v : v;
        }
        return -std::log(acc * h);
    };
    double lo = 0.0, hi = 1.0;
    while (phi(hi) > phi(hi / 2)) hi *= 2;
    for (int i = 0; i < 100; ++i) {
        double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        (phi(m1) < phi(m2) ? lo : hi) = (phi(m1) < phi(m2) ? m1 : m2);
    }
    return phi(0.5 * (lo + hi));
}

bool within(double got, double want, double rel, double se) {
    return std::abs(got - want) <= std::max(rel * want, 3.0 * se);
}

}  // namespace

TEST_CASE("uniform min_shift tail rate") {
    auto u = make_family("uniform", {0.0, 1.0});
    auto r = mc_tail_rate(u, EstimatorSpec::min_shift(), 0.0, 0.1, params(grid(5, 50), 100000));
    CHECK(r.beta_minus.is_infinite());
    CHECK(within(r.beta_plus.value(), -std::log(0.9), 0.05, 0));
    CHECK(r.beta == r.beta_plus);
}

TEST_CASE("gaussian mle tail rate") {
    auto g = make_family("gaussian", {1.0});
    auto r = mc_tail_rate(g, EstimatorSpec::mle(), 0.0, 0.5, params(grid(4, 40), 100000));
    CHECK(within(r.beta.value(), 0.125, 0.10, 0));
    CHECK(r.fit_plus.model == TailModel::bahadur_rao);
    // data processing: no estimator beats the test between theta -+ eps
    auto c = chernoff_test_rate({g, -0.5}, {g, 0.5});
    CHECK(r.beta.value() <= c.value.value() + 3 * r.slope_stderr);
}

TEST_CASE("convex combination on uniform and beta(2,2)") {
    for (auto f : {make_family("uniform", {0.0, 1.0}), make_family("beta", {2.0, 2.0})}) {
        CAPTURE(f.name());
        // small n sit far from the asymptotic prefactor, so the grid starts at 12
        auto r = mc_tail_rate(f, EstimatorSpec::convex_combo(0.5), 0.0, 0.1, params(grid(4, 64, 12), 100000));
        auto os = order_stat_rates(f, 0.1, 0.5);
        CHECK(within(r.beta_plus.value(), os.combo_plus.value(), 0.05, r.stderr_plus));
        CHECK(within(r.beta_minus.value(), os.combo_minus.value(), 0.05, r.stderr_minus));
    }
}

TEST_CASE("mle_chernoff_rate") {
    auto g = make_family("gaussian", {1.0});
    CHECK(mle_chernoff_rate(g, 0.5, Side::plus) == doctest::Approx(0.125).epsilon(1e-8));
    CHECK(mle_chernoff_rate(g, 0.5, Side::minus) == doctest::Approx(0.125).epsilon(1e-8));
    CHECK(mle_chernoff_rate(g, 0.0, Side::plus) == 0.0);
    auto b = make_family("beta", {3.0, 3.0});
    const double oracle = beta33_mle_plus(0.05);
    CHECK(mle_chernoff_rate(b, 0.05, Side::plus) == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(mle_chernoff_rate(b, 0.05, Side::minus) == doctest::Approx(oracle).epsilon(1e-6));
    double prev = 0.0;
    for (double e : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        double v = mle_chernoff_rate(b, e, Side::plus);
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(mle_chernoff_rate(make_family("beta", {0.5, 0.5}), 0.1, Side::plus), UnsupportedFamily);
    CHECK_THROWS_AS(mle_chernoff_rate(g, -0.1, Side::plus), InvalidParameter);
}

TEST_CASE("order_stat_rates examples") {
    auto b = make_family("beta", {2.0, 2.0});
    auto r = order_stat_rates(b, 0.1);
    CHECK(r.upper_minus.value() == doctest::Approx(-std::log(0.972)).epsilon(1e-12));
    CHECK(r.upper_plus.is_infinite());
    CHECK(r.lower_plus.value() == doctest::Approx(-std::log(0.972)).epsilon(1e-12));
    CHECK(r.lower_minus.is_infinite());
    auto u = order_stat_rates(make_family("uniform", {0.0, 1.0}), 0.1, 0.5);
    CHECK(u.combo_plus.value() == doctest::Approx(-std::log(0.8)).epsilon(1e-12));
    CHECK(u.shifted_plus.value() == doctest::Approx(-std::log(0.8)).epsilon(1e-12));
    CHECK_THROWS_AS(order_stat_rates(make_family("gaussian", {1.0}), 0.1), UnsupportedFamily);
    CHECK_THROWS_AS(order_stat_rates(b, 0.6, 0.5), DomainError);
    // integral windows shrink as eps grows
    double prev = 0.0;
    for (double e : {0.01, 0.05, 0.1, 0.2, 0.3}) {
        auto s = order_stat_rates(b, e, 0.4);
        CHECK(s.combo_plus.value() > prev);
        prev = s.combo_plus.value();
    }
}

TEST_CASE("order statistic rates: simulation against closed forms") {
    auto b = make_family("beta", {2.0, 2.0});
    auto os = order_stat_rates(b, 0.1);
    auto up = mc_tail_rate(b, EstimatorSpec::max_shift(), 0.0, 0.1, params(grid(5, 60), 50000));
    CHECK(up.beta_plus.is_infinite());
    CHECK(within(up.beta_minus.value(), os.upper_minus.value(), 0.05, up.stderr_minus));
    Extended p, m;
    REQUIRE(analytic_rates(b, EstimatorSpec::max_shift(), 0.1, p, m));
    CHECK(m == os.upper_minus);
    CHECK_FALSE(analytic_rates(make_family("gaussian", {1.0}), EstimatorSpec::min_shift(), 0.1, p, m));
}

TEST_CASE("lr rate identity") {
    auto g = make_family("gaussian", {1.0});
    auto r = lr_rate_identity(g, 0.0, 0.25, params(grid(20, 200), 20000));
    CHECK(r.rhs.value() == doctest::Approx(0.03125).epsilon(1e-8));
    CHECK(within(r.lhs.value(), r.rhs.value(), 0.15, 0));

    auto b = make_family("beta", {2.0, 2.0});
    auto rb = lr_rate_identity(b, 0.0, 0.1, params(grid(5, 60), 20000));
    CHECK(within(rb.lhs.value(), rb.rhs.value(), 0.15, 0));
    CHECK(std::isfinite(rb.lhs_stderr));

    auto u = make_family("uniform", {0.0, 1.0});
    auto d = lr_rate_identity(u, 0.0, 0.6, params(grid(5, 20), 10000));
    CHECK(d.disjoint);
    CHECK(d.rhs.is_infinite());
}

TEST_CASE("chernoff_test_rate examples") {
    auto g = make_family("gaussian", {1.0});
    auto c = chernoff_test_rate({g, 0.0}, {g, 1.0});
    CHECK(c.value.value() == doctest::Approx(0.125).epsilon(1e-9));
    CHECK(c.s_star == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(chernoff_test_rate({g, 0.3}, {g, 0.3}).value.value() == doctest::Approx(0.0).epsilon(1e-12));
    auto u = make_family("uniform", {0.0, 1.0});
    CHECK(chernoff_test_rate({u, 0.0}, {u, 0.1}).value.value() == doctest::Approx(-std::log(0.9)).epsilon(1e-9));
    CHECK(chernoff_test_rate({u, 0.0}, {u, 1.5}).value.is_infinite());
}

TEST_CASE("hoeffding_rate examples") {
    auto g = make_family("gaussian", {1.0});
    auto h0 = hoeffding_rate({g, 0.0}, {g, 1.0}, 0.0);
    CHECK(h0.value.value() == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(h0.at_boundary);
    CHECK(hoeffding_rate({g, 0.0}, {g, 1.0}, 0.125).value.value() == doctest::Approx(0.125).epsilon(1e-8));
    auto big = hoeffding_rate({g, 0.0}, {g, 1.0}, 50.0);
    CHECK(big.value.value() == 0.0);
    CHECK(big.clamped);
    CHECK_THROWS_AS(hoeffding_rate({g, 0.0}, {g, 1.0}, -1.0), InvalidParameter);
}

TEST_CASE("hoeffding at r = 0 dominates chernoff") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        DensityFamily f = i % 2 ? make_family("gaussian", {0.5 + u(rng)}) : make_family("beta", {2.0 + 2 * u(rng), 2.0 + 2 * u(rng)});
        double d = 0.05 + 0.3 * u(rng);
        FamilyPoint p{f, 0.0}, q{f, d};
        auto h = hoeffding_rate(p, q, 0.0);
        auto c = chernoff_test_rate(p, q);
        CHECK(h.value.as_double() >= c.value.value() - 1e-9);
    }
}

TEST_CASE("ht_simulate") {
    auto g = make_family("gaussian", {1.0});
    auto same = ht_simulate({g, 0.0}, {g, 0.0}, params(grid(10, 50), 10000));
    CHECK(std::abs(same.slope) < 1e-9);

    auto u = make_family("uniform", {0.0, 1.0});
    auto r = ht_simulate({u, 0.0}, {u, 0.3}, params(grid(2, 20), 50000));
    CHECK(within(r.slope, -std::log(0.7), 0.10, 0));
    for (double e : r.e1) CHECK(e == 0.0);

    CHECK_THROWS_AS(ht_simulate({g, 0.0}, {g, 1.0}, params(grid(10, 50), 100)), InvalidParameter);
}

TEST_CASE("alpha2_estimate on uniform convex combination") {
    auto u = make_family("uniform", {0.0, 1.0});
    auto a = alpha2_estimate(u, EstimatorSpec::convex_combo(0.5), 0.0, ScalingFunction::abs(), {0.2, 0.1, 0.05},
                             params(grid(6, 60), 20000));
    CHECK(a.window_consistent);
    REQUIRE(a.ratios.size() == 3);
    CHECK(a.value == doctest::Approx(-std::log(0.9) / 0.05).epsilon(0.05));
    CHECK(a.value == a.ratios.back());
    CHECK(a.trend == doctest::Approx(a.ratios[2] - a.ratios[1]));
}

TEST_CASE("simulation is deterministic across thread counts") {
    auto b = make_family("beta", {2.0, 2.0});
    auto mc = params(grid(5, 30), 20000, 99);
    auto r1 = mc_tail_rate(b, EstimatorSpec::mle(), 0.0, 0.1, mc);
    mc.threads = 3;
    auto r3 = mc_tail_rate(b, EstimatorSpec::mle(), 0.0, 0.1, mc);
    CHECK(r1.p_plus == r3.p_plus);
    CHECK(r1.p_minus == r3.p_minus);
    CHECK(r1.beta == r3.beta);
    CHECK(trial_seed(1, 2, 3) != trial_seed(1, 3, 2));
}

TEST_CASE("empirical rates are shift invariant within noise") {
    auto u = make_family("uniform", {0.0, 1.0});
    auto mc = params(grid(5, 40), 50000);
    auto r0 = mc_tail_rate(u, EstimatorSpec::min_shift(), 0.0, 0.1, mc);
    mc.seed = 12;
    auto r5 = mc_tail_rate(u, EstimatorSpec::min_shift(), 5.0, 0.1, mc);
    CHECK(std::abs(r0.beta.value() - r5.beta.value()) <= 4 * std::hypot(r0.slope_stderr, r5.slope_stderr));
}

TEST_CASE("mc_tail_rate argument checks") {
    auto u = make_family("uniform", {0.0, 1.0});
    CHECK_THROWS_AS(mc_tail_rate(u, EstimatorSpec::min_shift(), 0.0, 0.0, params(grid(5, 20), 10000)), InvalidParameter);
    CHECK_THROWS_AS(mc_tail_rate(make_family("gaussian", {1.0}), EstimatorSpec::min_shift(), 0.0, 0.1,
                                 params(grid(5, 20), 10000)),
                    UnsupportedFamily);
}
