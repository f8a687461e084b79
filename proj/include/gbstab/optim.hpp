#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace gbstab::optim {

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    bool converged = false;
    int evaluations = 0;
};

/// Derivative-free simplex minimization; good enough for loss-minimizer
/// initialization where gradients of the mixture integral are awkward.
inline NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                                    std::vector<double> x0, double tol = 1e-10,
                                    int max_iter = 0) {
    const std::size_t d = x0.size();
    if (d == 0) throw std::invalid_argument("nelder_mead: empty start point");
    if (max_iter <= 0) max_iter = 800 * static_cast<int>(d);

    NelderMeadResult result;
    std::vector<std::vector<double>> simplex(d + 1, x0);
    std::vector<double> fvals(d + 1);
    for (std::size_t j = 0; j < d; ++j)
        simplex[j + 1][j] += 0.05 * (1.0 + std::abs(x0[j]));
    for (std::size_t i = 0; i <= d; ++i) {
        fvals[i] = f(simplex[i]);
        ++result.evaluations;
    }

    const auto order = [&]() {
        for (std::size_t i = 0; i <= d; ++i)
            for (std::size_t j = i + 1; j <= d; ++j)
                if (fvals[j] < fvals[i]) {
                    std::swap(fvals[i], fvals[j]);
                    std::swap(simplex[i], simplex[j]);
                }
    };

    std::vector<double> centroid(d), xr(d), xe(d), xc(d);
    for (int iter = 0; iter < max_iter; ++iter) {
        order();
        if (std::abs(fvals[d] - fvals[0]) <=
            tol * (std::abs(fvals[0]) + std::abs(fvals[d]) + 1e-30)) {
            result.converged = true;
            break;
        }
        for (std::size_t j = 0; j < d; ++j) {
            centroid[j] = 0.0;
            for (std::size_t i = 0; i < d; ++i) centroid[j] += simplex[i][j];
            centroid[j] /= static_cast<double>(d);
        }
        for (std::size_t j = 0; j < d; ++j) xr[j] = centroid[j] + (centroid[j] - simplex[d][j]);
        double fr = f(xr);
        ++result.evaluations;
        if (fr < fvals[0]) {
            for (std::size_t j = 0; j < d; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - simplex[d][j]);
            const double fe = f(xe);
            ++result.evaluations;
            if (fe < fr) {
                simplex[d] = xe;
                fvals[d] = fe;
            } else {
                simplex[d] = xr;
                fvals[d] = fr;
            }
        } else if (fr < fvals[d - 1]) {
            simplex[d] = xr;
            fvals[d] = fr;
        } else {
            const bool outside = fr < fvals[d];
            const std::vector<double>& base = outside ? xr : simplex[d];
            for (std::size_t j = 0; j < d; ++j) xc[j] = centroid[j] + 0.5 * (base[j] - centroid[j]);
            const double fc = f(xc);
            ++result.evaluations;
            if (fc < (outside ? fr : fvals[d])) {
                simplex[d] = xc;
                fvals[d] = fc;
            } else {
                for (std::size_t i = 1; i <= d; ++i) {
                    for (std::size_t j = 0; j < d; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    fvals[i] = f(simplex[i]);
                    ++result.evaluations;
                }
            }
        }
    }
    order();
    result.x = simplex[0];
    result.value = fvals[0];
    return result;
}

/// Golden-section minimization of a unimodal f on [lo, hi]. Throws if the
/// minimizer lands on an endpoint (bracket failure, f likely not unimodal in
/// the given interval).
inline double golden_section(const std::function<double(double)>& f, double lo, double hi,
                             double tol = 1e-6) {
    if (!(lo < hi)) throw std::invalid_argument("golden_section: empty interval");
    const double gr = 0.6180339887498948482;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    if (x - lo < 2.0 * tol || hi - x < 2.0 * tol)
        throw std::runtime_error("golden_section: minimum at bracket boundary");
    return x;
}

}  // namespace gbstab::optim
