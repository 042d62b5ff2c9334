#include "ldbounds/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "ldbounds/errors.hpp"
#include "ldbounds/optimize.hpp"
#include "ldbounds/quadrature.hpp"

namespace ldb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kMinEvents = 10;

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

unsigned thread_count(unsigned requested, std::uint64_t trials) {
    unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(1, trials / 1000)));
}

// runs body(first, last, slot) on contiguous trial ranges; slots are summed by the caller
template <class Body>
void parallel_trials(std::uint64_t trials, unsigned threads, Body body) {
    if (threads <= 1) {
        body(0, trials, 0u);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        std::uint64_t first = trials * t / threads, last = trials * (t + 1) / threads;
        pool.emplace_back([&body, first, last, t] { body(first, last, t); });
    }
    for (auto& th : pool) th.join();
}

void check_grid(const std::vector<int>& n_grid, std::uint64_t trials) {
    if (n_grid.size() < 4) throw InvalidParameter("n_grid needs at least 4 points");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw InvalidParameter("n_grid entries must be positive");
        if (i && n_grid[i] <= n_grid[i - 1]) throw InvalidParameter("n_grid must be increasing");
    }
    if (trials < 10000) throw InvalidParameter("trials must be at least 1e4");
}

struct SideFit {
    Extended rate;
    double stderr_ = 0.0;
    TailFit fit;
};

// counts are P(side) * trials on the simulated n
// smooth: sums, n^-1/2 prefactor. exact_geometric: P = Fbar^n for a single order statistic.
// polynomial: min and max together, prefactor n^-(kappa-1) from the far edge with
// 1/n corrections that a chi^2 gate does not see at desk scale.
enum class TailShape { smooth, exact_geometric, polynomial };

SideFit fit_side(const std::vector<int>& ns, const std::vector<std::uint64_t>& counts, double trials,
                 TailModel model, TailShape shape) {
    SideFit out;
    if (std::all_of(counts.begin(), counts.end(), [](std::uint64_t c) { return c == 0; })) {
        out.rate = Extended::infinite();
        return out;
    }
    std::vector<TailPoint> pts;
    for (std::size_t i = 0; i < ns.size() && counts[i] >= kMinEvents; ++i) {
        double p = counts[i] / trials;
        pts.push_back({static_cast<double>(ns[i]), p, binomial_var_log(p, trials)});
    }
    if (pts.size() < 3) {
        // too few events for a regression; a crude geometric fit on whatever was seen
        pts.clear();
        for (std::size_t i = 0; i < ns.size(); ++i)
            if (counts[i] > 0) {
                double p = counts[i] / trials;
                pts.push_back({static_cast<double>(ns[i]), p, binomial_var_log(p, trials)});
            }
        if (pts.size() == 1) {
            out.rate = Extended(std::max(0.0, -std::log(pts[0].p_hat) / pts[0].n));
            out.stderr_ = kInf;
            out.fit.used = 1;
            return out;
        }
        out.fit = fit_tail(pts, TailModel::geometric, shape == TailShape::smooth);
        out.rate = Extended(std::max(0.0, out.fit.slope));
        out.stderr_ = kInf;
        return out;
    }
    if (model == TailModel::automatic && shape != TailShape::smooth && pts.size() >= 4)
        model = shape == TailShape::polynomial ? TailModel::free_log : TailModel::geometric;
    out.fit = fit_tail(pts, model, shape == TailShape::smooth);
    out.rate = Extended(std::max(0.0, out.fit.slope));
    out.stderr_ = out.fit.stderr_;
    return out;
}

double log_int_exp(const std::function<double(double)>& h, double lo, double hi) {
    double M = -kInf;
    const int m = 400;
    for (int i = 1; i < m; ++i) M = std::max(M, h(lo + (hi - lo) * i / m));
    if (!std::isfinite(M)) return M;
    auto g = [&](double x) {
        double v = h(x) - M;
        return v > -745.0 ? std::exp(v) : 0.0;
    };
    double I = integrate(g, lo, hi).value;
    return M + std::log(I);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t root, std::uint64_t n, std::uint64_t trial) {
    return splitmix(splitmix(splitmix(root) ^ n) ^ trial);
}

TailRateEstimate mc_tail_rate(const DensityFamily& f, const EstimatorSpec& spec, double theta, double eps,
                              const MCParams& mc) {
    check_grid(mc.n_grid, mc.trials);
    if (!(eps > 0.0)) throw InvalidParameter("mc_tail_rate: eps must be positive");
    validate(spec, f);
    const unsigned threads = thread_count(mc.threads, mc.trials);
    TailRateEstimate est;
    est.trials = mc.trials;
    est.seed = mc.seed;
    std::vector<std::uint64_t> plus, minus;
    for (int n : mc.n_grid) {
        std::vector<std::uint64_t> cp(threads, 0), cm(threads, 0);
        parallel_trials(mc.trials, threads, [&](std::uint64_t first, std::uint64_t last, unsigned slot) {
            std::vector<double> x(static_cast<std::size_t>(n));
            std::uint64_t p = 0, m = 0;
            for (std::uint64_t t = first; t < last; ++t) {
                std::mt19937_64 rng(trial_seed(mc.seed, static_cast<std::uint64_t>(n), t));
                f.fill(rng, x);
                for (double& v : x) v += theta;
                double T = estimate(spec, f, x);
                p += T > theta + eps;
                m += T < theta - eps;
            }
            cp[slot] = p;
            cm[slot] = m;
        });
        std::uint64_t p = 0, m = 0;
        for (unsigned s = 0; s < threads; ++s) p += cp[s], m += cm[s];
        est.n_grid.push_back(n);
        plus.push_back(p);
        minus.push_back(m);
        const double T = static_cast<double>(mc.trials);
        est.p_plus.push_back(p / T);
        est.p_minus.push_back(m / T);
        est.p_hats.push_back((p + m) / T);
        if (p < kMinEvents && m < kMinEvents) break;
    }
    const TailShape shape = !spec.order_statistic()                      ? TailShape::smooth
                            : spec.kind == EstimatorKind::convex_combo ? TailShape::polynomial
                                                                       : TailShape::exact_geometric;
    const bool none_plus = std::all_of(plus.begin(), plus.end(), [](auto c) { return c == 0; });
    const bool none_minus = std::all_of(minus.begin(), minus.end(), [](auto c) { return c == 0; });
    if (none_plus && none_minus)
        throw InsufficientEvents("mc_tail_rate: no tail events on either side for " + spec.name());
    auto sp = fit_side(est.n_grid, plus, static_cast<double>(mc.trials), mc.model, shape);
    auto sm = fit_side(est.n_grid, minus, static_cast<double>(mc.trials), mc.model, shape);
    est.beta_plus = sp.rate;
    est.beta_minus = sm.rate;
    est.stderr_plus = sp.stderr_;
    est.stderr_minus = sm.stderr_;
    est.fit_plus = sp.fit;
    est.fit_minus = sm.fit;
    est.beta = min(sp.rate, sm.rate);
    if (sp.rate.is_infinite())
        est.slope_stderr = sm.stderr_;
    else if (sm.rate.is_infinite())
        est.slope_stderr = sp.stderr_;
    else
        est.slope_stderr = sp.rate.value() <= sm.rate.value() ? sp.stderr_ : sm.stderr_;
    return est;
}

double mle_chernoff_rate(const DensityFamily& f, double eps, Side side) {
    if (!f.log_concave()) throw UnsupportedFamily("mle_chernoff_rate needs a log-concave family (" + f.name() + ")");
    if (eps < 0.0) throw InvalidParameter("mle_chernoff_rate: eps must be nonnegative");
    if (eps == 0.0) return 0.0;
    auto [wl, wh] = f.effective_support();
    double lo, hi;
    if (side == Side::plus) {
        lo = std::max(f.a(), wl) + eps;
        hi = std::min(f.b(), wh);
    } else {
        lo = std::max(f.a(), wl);
        hi = std::min(f.b(), wh) - eps;
    }
    if (!(lo < hi)) return kInf;
    const double sgn = side == Side::plus ? -1.0 : 1.0;
    const double shift = side == Side::plus ? -eps : eps;
    auto phi = [&](double t) {
        auto h = [&](double x) {
            double lf = f.std_log_density(x);
            if (!std::isfinite(lf)) return -kInf;
            if (t == 0.0) return lf;
            return sgn * t * f.std_score(x + shift) + lf;
        };
        return -log_int_exp(h, lo, hi);
    };
    // concave in t: walk a geometric grid until it turns down, then golden section
    double t_prev2 = 0.0, t_prev = 0.0, f_prev = phi(0.0);
    double t = 1e-4;
    for (; t < 1e9; t *= 2.0) {
        double ft = phi(t);
        if (ft < f_prev) break;
        t_prev2 = t_prev;
        t_prev = t;
        f_prev = ft;
    }
    if (t >= 1e9) return kInf;
    auto best = golden_max(phi, t_prev2, t, 1e-10);
    return std::max(best.fx, f_prev);
}

OrderStatRates order_stat_rates(const DensityFamily& f, double eps, double lambda) {
    const double a = f.a(), b = f.b();
    if (!std::isfinite(a) || !std::isfinite(b))
        throw UnsupportedFamily("order_stat_rates needs a bounded support (" + f.name() + ")");
    if (!(eps > 0.0)) throw InvalidParameter("order_stat_rates: eps must be positive");
    if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidParameter("order_stat_rates: lambda must lie in (0,1)");
    const double w = b - a;
    if (eps >= w || eps / lambda >= w || eps / (1.0 - lambda) >= w)
        throw DomainError("order_stat_rates: window exceeds the support");
    // -log P(X > x) and -log P(X < x) for the standardized density
    auto above = [&](double x) { return Extended(-std::log1p(-f.cdf(0.0, x))); };
    auto below = [&](double x) { return Extended(-std::log(f.cdf(0.0, x))); };
    OrderStatRates r;
    r.lambda = lambda;
    // the minimum overshoots theta+eps only if every draw lands above a+eps
    r.lower_plus = above(a + eps);
    r.lower_minus = Extended::infinite();
    r.upper_plus = Extended::infinite();
    r.upper_minus = below(b - eps);
    r.combo_plus = above(a + eps / lambda);
    r.combo_minus = below(b - eps / (1.0 - lambda));
    r.shifted_plus = 2.0 * eps < w ? above(a + 2.0 * eps) : Extended::infinite();
    r.shifted_minus = Extended::infinite();
    return r;
}

bool analytic_rates(const DensityFamily& f, const EstimatorSpec& spec, double eps, Extended& plus, Extended& minus) {
    auto ext = [](double v) { return std::isfinite(v) ? Extended(v) : Extended::infinite(); };
    switch (spec.kind) {
        case EstimatorKind::mle:
            if (!f.log_concave()) return false;
            plus = ext(mle_chernoff_rate(f, eps, Side::plus));
            minus = ext(mle_chernoff_rate(f, eps, Side::minus));
            return true;
        case EstimatorKind::lr: {
            if (!f.log_concave()) return false;
            auto c = chernoff_test_rate({f, -eps}, {f, eps});
            plus = minus = c.value;
            return true;
        }
        default: break;
    }
    if (!std::isfinite(f.a()) || !std::isfinite(f.b())) return false;
    auto r = order_stat_rates(f, spec.kind == EstimatorKind::shifted_min ? spec.eps : eps,
                              spec.kind == EstimatorKind::convex_combo ? spec.lambda : 0.5);
    switch (spec.kind) {
        case EstimatorKind::min_shift: plus = r.lower_plus, minus = r.lower_minus; break;
        case EstimatorKind::max_shift: plus = r.upper_plus, minus = r.upper_minus; break;
        case EstimatorKind::convex_combo: plus = r.combo_plus, minus = r.combo_minus; break;
        case EstimatorKind::shifted_min:
            if (spec.eps != eps) return false;
            plus = r.shifted_plus, minus = r.shifted_minus;
            break;
        default: return false;
    }
    return true;
}

ChernoffResult chernoff_test_rate(const FamilyPoint& p, const FamilyPoint& q) {
    ChernoffResult out;
    auto mid = renyi_divergence(p, q, 0.5);
    if (mid.is_infinite()) {
        out.value = Extended::infinite();
        return out;
    }
    auto I = [&](double s) { return renyi_divergence(p, q, s).as_double(); };
    int best = 0;
    double bv = -kInf;
    const int m = 19;
    for (int i = 1; i <= m; ++i) {
        double v = I(0.05 * i);
        if (v > bv) bv = v, best = i;
    }
    double lo = std::max(1e-4, 0.05 * (best - 1)), hi = std::min(1.0 - 1e-4, 0.05 * (best + 1));
    auto e = golden_max(I, lo, hi, 1e-9);
    out.value = Extended(std::max(e.fx, bv));
    out.s_star = e.fx >= bv ? e.x : 0.05 * best;
    for (int which : {0, 1}) {
        double v = renyi_endpoint(p, q, which).as_double();
        // endpoint limits only win when the curve is flat or monotone to the edge
        if (v > out.value.value() * (1.0 + 1e-12)) {
            out.value = Extended(v);
            out.s_star = which;
        }
    }
    return out;
}

HoeffdingResult hoeffding_rate(const FamilyPoint& p, const FamilyPoint& q, double r) {
    if (!(r >= 0.0)) throw InvalidParameter("hoeffding_rate: r must be nonnegative");
    HoeffdingResult out;
    auto e1 = renyi_endpoint(p, q, 1);
    if (e1.is_infinite() || e1.value() > r) {
        out.value = Extended::infinite();
        out.s_star = 1.0;
        out.at_boundary = true;
        return out;
    }
    auto phi = [&](double s) { return (renyi_divergence(p, q, s).as_double() - s * r) / (1.0 - s); };
    const double delta = 1e-3;
    std::vector<double> grid{delta};
    for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
    grid.push_back(1.0 - delta);
    std::size_t best = 0;
    double bv = -kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = phi(grid[i]);
        if (v > bv) bv = v, best = i;
    }
    double value = bv, s_star = grid[best];
    if (best == grid.size() - 1) {
        // still climbing at the right edge: linear extrapolation to s = 1
        double lim = 2.0 * phi(1.0 - delta) - phi(1.0 - 2.0 * delta);
        out.at_boundary = true;
        if (lim > value) value = lim;
        s_star = 1.0;
    } else {
        double lo = best ? grid[best - 1] : delta;
        double hi = grid[std::min(best + 1, grid.size() - 1)];
        auto e = golden_max(phi, lo, hi, 1e-9);
        if (e.fx > value) value = e.fx, s_star = e.x;
    }
    // s -> 0 gives I^0 >= 0; when every interior value is negative, the bound is the floor at 0
    if (value < 0.0) {
        value = std::max(0.0, renyi_endpoint(p, q, 0).as_double());
        s_star = 0.0;
        out.clamped = true;
    }
    out.value = Extended(value);
    out.s_star = s_star;
    return out;
}

LrIdentity lr_rate_identity(const DensityFamily& f, double theta, double eps, const MCParams& mc) {
    if (!f.log_concave()) throw UnsupportedFamily("lr_rate_identity needs a log-concave family (" + f.name() + ")");
    LrIdentity out;
    auto c = chernoff_test_rate({f, theta - eps}, {f, theta + eps});
    out.rhs = c.value;
    if (c.value.is_infinite()) {
        out.disjoint = true;
        out.lhs = Extended::infinite();
        return out;
    }
    MCParams up = mc, dn = mc;
    up.seed = splitmix(mc.seed ^ 0x55aa);
    dn.seed = splitmix(mc.seed ^ 0xaa55);
    out.at_upper = mc_tail_rate(f, EstimatorSpec::lr(eps), theta + eps, eps, up);
    out.at_lower = mc_tail_rate(f, EstimatorSpec::lr(eps), theta - eps, eps, dn);
    const Extended bm = out.at_upper.beta_minus, bp = out.at_lower.beta_plus;
    out.lhs = min(bm, bp);
    if (bm.is_infinite())
        out.lhs_stderr = out.at_lower.stderr_plus;
    else if (bp.is_infinite())
        out.lhs_stderr = out.at_upper.stderr_minus;
    else
        out.lhs_stderr = bm.value() <= bp.value() ? out.at_upper.stderr_minus : out.at_lower.stderr_plus;
    return out;
}

HtResult ht_simulate(const FamilyPoint& p, const FamilyPoint& q, const MCParams& mc) {
    check_grid(mc.n_grid, mc.trials);
    const unsigned threads = thread_count(mc.threads, mc.trials);
    const double T = static_cast<double>(mc.trials);
    HtResult out;
    std::vector<TailPoint> pts;
    bool usable = true;
    for (int n : mc.n_grid) {
        std::vector<std::uint64_t> c1(threads, 0), c2(threads, 0);
        parallel_trials(mc.trials, threads, [&](std::uint64_t first, std::uint64_t last, unsigned slot) {
            std::vector<double> x(static_cast<std::size_t>(n));
            auto llr = [&]() {
                double acc = 0.0;
                for (double v : x) acc += p.family.log_density(p.theta, v) - q.family.log_density(q.theta, v);
                return acc;
            };
            std::uint64_t e1 = 0, e2 = 0;
            for (std::uint64_t t = first; t < last; ++t) {
                std::mt19937_64 rp(trial_seed(mc.seed, static_cast<std::uint64_t>(n), 2 * t));
                p.family.fill(rp, x);
                for (double& v : x) v += p.theta;
                e1 += llr() < 0.0;  // ties go to acceptance of p
                std::mt19937_64 rq(trial_seed(mc.seed, static_cast<std::uint64_t>(n), 2 * t + 1));
                q.family.fill(rq, x);
                for (double& v : x) v += q.theta;
                e2 += llr() >= 0.0;
            }
            c1[slot] = e1;
            c2[slot] = e2;
        });
        std::uint64_t e1 = 0, e2 = 0;
        for (unsigned s = 0; s < threads; ++s) e1 += c1[s], e2 += c2[s];
        out.n_grid.push_back(n);
        out.e1.push_back(e1 / T);
        out.e2.push_back(e2 / T);
        if (e1 + e2 < kMinEvents) break;
        if (usable) {
            double a = e1 / T, b = e2 / T, s = a + b;
            double var = (a * (1.0 - a) + b * (1.0 - b)) / T + 1.0 / (T * T);
            pts.push_back({static_cast<double>(n), s, var / (s * s)});
        }
    }
    if (pts.size() < 3) throw InsufficientEvents("ht_simulate: fewer than 3 sizes with enough error events");
    // with equal supports the log likelihood ratio is a finite sum; otherwise
    // the errors are driven by draws outside the other support
    const bool smooth = p.family.a() + p.theta == q.family.a() + q.theta &&
                        p.family.b() + p.theta == q.family.b() + q.theta;
    out.fit = fit_tail(pts, mc.model, smooth);
    out.slope = out.fit.slope;
    out.stderr_ = out.fit.stderr_;
    return out;
}

Alpha2Estimate alpha2_estimate(const DensityFamily& f, const EstimatorSpec& spec, double theta,
                               const ScalingFunction& g, const std::vector<double>& eps_ladder, const MCParams& mc) {
    if (eps_ladder.empty()) throw InvalidParameter("alpha2_estimate: empty eps ladder");
    Alpha2Estimate out;
    const double g_last = g(eps_ladder.back());
    for (std::size_t k = 0; k < eps_ladder.size(); ++k) {
        const double eps = eps_ladder[k];
        EstimatorSpec sk = spec;
        if (sk.eps_dependent()) sk.eps = eps;
        MCParams mk = mc;
        const double scale = g_last / g(eps);
        for (std::size_t i = 0; i < mk.n_grid.size(); ++i) {
            int n = std::max(1, static_cast<int>(std::lround(mc.n_grid[i] * scale)));
            if (i && n <= mk.n_grid[i - 1]) n = mk.n_grid[i - 1] + 1;
            mk.n_grid[i] = n;
        }
        // location families: the window infimum sits at either end, check they agree
        MCParams lo = mk, hi = mk;
        lo.seed = trial_seed(mc.seed, k, 0);
        hi.seed = trial_seed(mc.seed, k, 1);
        auto rl = mc_tail_rate(f, sk, theta - eps, eps, lo);
        auto rh = mc_tail_rate(f, sk, theta + eps, eps, hi);
        Extended b = min(rl.beta, rh.beta);
        if (rl.beta.is_finite() && rh.beta.is_finite()) {
            double d = std::abs(rl.beta.value() - rh.beta.value());
            double tol = std::max(0.1 * std::max(rl.beta.value(), rh.beta.value()),
                                  3.0 * std::hypot(rl.slope_stderr, rh.slope_stderr));
            if (d > tol) out.window_consistent = false;
        } else if (rl.beta.is_infinite() != rh.beta.is_infinite()) {
            out.window_consistent = false;
        }
        const double ge = g(eps);
        out.eps.push_back(eps);
        out.ratios.push_back(b.is_finite() ? b.value() / ge : kInf);
        const double se = b.is_finite() && b.value() == rl.beta.as_double() ? rl.slope_stderr : rh.slope_stderr;
        out.ratio_stderr.push_back(se / ge);
    }
    out.value = out.ratios.back();
    out.trend = out.ratios.size() > 1 ? out.ratios.back() - out.ratios[out.ratios.size() - 2] : 0.0;
    return out;
}

}  // namespace ldb
