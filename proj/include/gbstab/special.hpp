#pragma once

#include <cmath>

namespace gbstab::special {

double log_gamma(double x);

/// Standard normal CDF / quantile.
double normal_cdf(double z);
double normal_quantile(double p);

/// Regularized incomplete beta I_x(a, b), i.e. the Beta(a, b) CDF at x.
double beta_cdf(double x, double a, double b);

/// Student-t CDF / quantile for the standard t with nu degrees of freedom.
double student_t_cdf(double x, double nu);
double student_t_quantile(double p, double nu);

inline double log_sum_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

}  // namespace gbstab::special
