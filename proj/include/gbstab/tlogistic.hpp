#pragma once

namespace gbstab {

/// Generalized exponential exp_t(x) = max{1 + (1-t)x, 0}^(1/(1-t)) for
/// t != 1, reducing to exp(x) at t = 1. Valid for t in (0, 2).
double t_exp(double x, double t);

/// Log-partition G_t(a) of the t-logistic link: the unique G with
///   exp_t(a/2 - G) + exp_t(-a/2 - G) = 1.
/// Solved by bracketed bisection (tolerance 1e-12, max 200 iterations);
/// symmetric in a. Throws if the solver cannot meet the residual tolerance.
double t_log_partition(double xtheta, double t);

}  // namespace gbstab
