#pragma once

namespace ldb {

double log_gamma(double x);
double beta_fn(double x, double y);
double digamma(double x);

// h(t) = 2t + t(1-t)(psi(1+t) - psi(1)) - 1
double t0_residual(double t);
// unique root of t0_residual in (0, 1/2)
double solve_t0();

enum class L8Branch { kappa_1_2, kappa_0_1 };

// d/ds at s=1/2 of s(1-s(k-1))B(s+k(1-s),2-k)  (kappa_1_2)
// or of s B(s+k(1-s),1-k)                         (kappa_0_1)
double l8_derivative(double kappa, L8Branch branch);

// the function whose minimum at s=1/2 fixes the symmetric 1<k<2 bound
double l13_objective(double kappa, double s);

}  // namespace ldb
