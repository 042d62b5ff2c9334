#pragma once

#include <string>
#include <vector>

namespace ldb {

// y = -log p_n modelled as
//   geometric:    beta n + c
//   bahadur_rao:  beta n + log(n)/2 + c + d/n   (smooth statistics)
//   free_log:     beta n + gamma log n + c      (order statistics)
// automatic: bahadur_rao for smooth statistics (4+ points); otherwise geometric,
// moving to free_log only when chi^2 rejects it at 0.1%.
enum class TailModel { automatic, geometric, bahadur_rao, free_log };

std::string to_string(TailModel m);
TailModel tail_model_from_string(const std::string& s);

struct TailPoint {
    double n = 0.0;
    double p_hat = 0.0;
    double var_log = 0.0;  // variance of -log p_hat
};

struct TailFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    double log_coef = 0.0;  // coefficient of log n actually used
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 1.0;
    TailModel model = TailModel::geometric;
    std::size_t used = 0;
};

// var_log for a binomial frequency p_hat from `trials` draws
double binomial_var_log(double p_hat, double trials);

TailFit fit_tail(const std::vector<TailPoint>& pts, TailModel model, bool smooth_statistic);

}  // namespace ldb
