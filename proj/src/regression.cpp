#include "ldbounds/regression.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "ldbounds/errors.hpp"

namespace ldb {

std::string to_string(TailModel m) {
    switch (m) {
        case TailModel::automatic: return "automatic";
        case TailModel::geometric: return "geometric";
        case TailModel::bahadur_rao: return "bahadur_rao";
        case TailModel::free_log: return "free_log";
    }
    return "?";
}

TailModel tail_model_from_string(const std::string& s) {
    for (auto m : {TailModel::automatic, TailModel::geometric, TailModel::bahadur_rao, TailModel::free_log})
        if (to_string(m) == s) return m;
    throw InvalidParameter("unknown tail model '" + s + "'");
}

double binomial_var_log(double p_hat, double trials) {
    // delta method; the 1/trials floor keeps p_hat = 1 from getting infinite weight
    return (1.0 - p_hat + 1.0 / trials) / (p_hat * trials);
}

namespace {

TailFit wls(const std::vector<TailPoint>& pts, TailModel model) {
    const int m = static_cast<int>(pts.size());
    const int k = model == TailModel::geometric ? 2 : 3;
    if (m < k) throw InsufficientEvents("tail regression: " + std::to_string(m) + " usable points for a " +
                                        std::to_string(k) + "-parameter model");
    Eigen::MatrixXd X(m, k);
    Eigen::VectorXd y(m), w(m);
    for (int i = 0; i < m; ++i) {
        const double n = pts[i].n;
        double yi = -std::log(pts[i].p_hat);
        X(i, 0) = n;
        X(i, 1) = 1.0;
        if (model == TailModel::bahadur_rao) {
            yi -= 0.5 * std::log(n);
            X(i, 2) = 1.0 / n;
        } else if (model == TailModel::free_log) {
            X(i, 2) = std::log(n);
        }
        y(i) = yi;
        w(i) = 1.0 / std::max(pts[i].var_log, 1e-300);
    }
    Eigen::MatrixXd A = X.transpose() * w.asDiagonal() * X;
    Eigen::VectorXd b = X.transpose() * w.asDiagonal() * y;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    Eigen::VectorXd coef = ldlt.solve(b);
    Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    Eigen::VectorXd r = y - X * coef;

    TailFit fit;
    fit.model = model;
    fit.used = static_cast<std::size_t>(m);
    fit.slope = coef(0);
    fit.stderr_ = std::sqrt(std::max(0.0, cov(0, 0)));
    fit.log_coef = model == TailModel::bahadur_rao ? 0.5 : (model == TailModel::free_log ? coef(2) : 0.0);
    fit.chi2 = (r.array().square() * w.array()).sum();
    fit.dof = m - k;
    fit.p_value = fit.dof > 0 ? boost::math::gamma_q(0.5 * fit.dof, 0.5 * fit.chi2) : 1.0;
    return fit;
}

}  // namespace

TailFit fit_tail(const std::vector<TailPoint>& pts, TailModel model, bool smooth_statistic) {
    if (!pts.empty() && std::all_of(pts.begin(), pts.end(), [](const TailPoint& p) { return p.p_hat >= 1.0; })) {
        TailFit f;
        f.used = pts.size();
        return f;
    }
    if (model != TailModel::automatic) return wls(pts, model);
    // sums always carry the n^-1/2 prefactor; chi^2 rarely sees it at desk scale
    if (smooth_statistic && pts.size() >= 4) return wls(pts, TailModel::bahadur_rao);
    TailFit geo = wls(pts, TailModel::geometric);
    if (geo.dof < 1 || geo.p_value >= 1e-3 || pts.size() < 4) return geo;
    return wls(pts, TailModel::free_log);
}

}  // namespace ldb
