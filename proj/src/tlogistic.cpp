#include "gbstab/tlogistic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gbstab {

double t_exp(double x, double t) {
    if (!(t > 0.0 && t < 2.0)) throw std::domain_error("t_exp: t must lie in (0,2)");
    if (!std::isfinite(x)) throw std::domain_error("t_exp: non-finite argument");
    if (t == 1.0) return std::exp(x);
    const double base = 1.0 + (1.0 - t) * x;
    if (base <= 0.0) {
        // 0^(1/(1-t)): 0 for t < 1; the t > 1 branch never reaches a
        // nonpositive base from below since base -> 0+ gives +inf there.
        return t < 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return std::pow(base, 1.0 / (1.0 - t));
}

double t_log_partition(double xtheta, double t) {
    if (!(t > 0.0 && t < 2.0)) throw std::domain_error("t_log_partition: t must lie in (0,2)");
    if (!std::isfinite(xtheta)) throw std::domain_error("t_log_partition: non-finite argument");
    if (t == 1.0) {
        // logistic log-partition log(e^{a/2} + e^{-a/2})
        const double h = 0.5 * std::abs(xtheta);
        return h + std::log1p(std::exp(-2.0 * h));
    }
    const double a = std::abs(xtheta);  // G_t is symmetric
    const auto residual = [&](double g) {
        return t_exp(0.5 * a - g, t) + t_exp(-0.5 * a - g, t) - 1.0;
    };

    // residual is decreasing in g; expand until it brackets 0
    double lo = 0.0, hi = 1.0;
    while (residual(lo) < 0.0) {
        hi = lo;
        lo -= 1.0;
        if (lo < -1e6) throw std::runtime_error("t_log_partition: bracket expansion failed (low)");
    }
    while (residual(hi) > 0.0) {
        lo = hi;
        hi += 1.0;
        if (hi > 1e6) throw std::runtime_error("t_log_partition: bracket expansion failed (high)");
    }

    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12) break;
    }
    const double g = 0.5 * (lo + hi);
    const double res = residual(g);
    if (std::abs(res) > 1e-10)
        throw std::runtime_error("t_log_partition: solver did not converge, residual " +
                                 std::to_string(res) + " at xtheta " + std::to_string(xtheta));
    return g;
}

}  // namespace gbstab
