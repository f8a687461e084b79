#include "gbstab/special.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <limits>
#include <stdexcept>

namespace gbstab::special {

double log_gamma(double x) { return boost::math::lgamma(x); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p outside (0,1)");
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double beta_cdf(double x, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(a, b, x);
}

double student_t_cdf(double x, double nu) {
    if (nu <= 0.0) throw std::domain_error("student_t_cdf: nu must be positive");
    const double x2 = x * x;
    const double ib = boost::math::ibeta(nu / 2.0, 0.5, nu / (nu + x2));
    return x > 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double student_t_quantile(double p, double nu) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("student_t_quantile: p outside (0,1)");
    if (nu <= 0.0) throw std::domain_error("student_t_quantile: nu must be positive");
    if (p == 0.5) return 0.0;
    const bool upper = p > 0.5;
    const double tail = upper ? 1.0 - p : p;
    // x from the inverted tail relation: tail = 0.5 * I_{nu/(nu+x^2)}(nu/2, 1/2)
    const double z = boost::math::ibeta_inv(nu / 2.0, 0.5, 2.0 * tail);
    const double x = std::sqrt(nu * (1.0 - z) / z);
    return upper ? x : -x;
}

}  // namespace gbstab::special
