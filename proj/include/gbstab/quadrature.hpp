#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gbstab::quad {

inline constexpr double kAbsTol = 1e-10;
inline constexpr double kRelTol = 1e-8;

/// Thrown when the adaptive scheme cannot meet the requested tolerance;
/// carries the error estimate it did achieve.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_error(achieved) {}
    double achieved_error;
};

namespace detail {

template <class F>
double kronrod(const F& f, double a, double b, double* err) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    return GK::integrate(f, a, b, /*max_depth=*/18, /*tol=*/1e-12, err);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b]; either endpoint may
/// be infinite. Throws QuadratureError if the error estimate exceeds
/// max(abs_tol, rel_tol * |I|).
template <class F>
double integrate(const F& f, double a, double b,
                 double abs_tol = kAbsTol, double rel_tol = kRelTol) {
    double err = 0.0;
    const double value = detail::kronrod(f, a, b, &err);
    if (!std::isfinite(value))
        throw QuadratureError("integrate: non-finite result", err);
    if (err > std::max(abs_tol, rel_tol * std::abs(value)))
        throw QuadratureError("integrate: tolerance not met", err);
    return value;
}

/// Integration over the whole real line with a finite core interval
/// [core_lo, core_hi] known to contain the mass concentration. The core is
/// integrated in segments so narrow features are found; the tails use the
/// library's infinite-interval transform.
template <class F>
double integrate_with_core(const F& f, double core_lo, double core_hi,
                           double abs_tol = kAbsTol, double rel_tol = kRelTol) {
    if (!(core_lo < core_hi)) throw std::invalid_argument("integrate_with_core: empty core");
    constexpr int kSegments = 8;
    const double step = (core_hi - core_lo) / kSegments;
    double value = 0.0, err = 0.0;
    for (int s = 0; s < kSegments; ++s) {
        double e = 0.0;
        value += detail::kronrod(f, core_lo + s * step, core_lo + (s + 1) * step, &e);
        err += e;
    }
    double e_lo = 0.0, e_hi = 0.0;
    value += detail::kronrod(f, -std::numeric_limits<double>::infinity(), core_lo, &e_lo);
    value += detail::kronrod(f, core_hi, std::numeric_limits<double>::infinity(), &e_hi);
    err += e_lo + e_hi;
    if (!std::isfinite(value))
        throw QuadratureError("integrate_with_core: non-finite result", err);
    if (err > std::max(abs_tol, rel_tol * std::abs(value)))
        throw QuadratureError("integrate_with_core: tolerance not met", err);
    return value;
}

}  // namespace gbstab::quad
