#include "gbstab/divergences.hpp"

#include "gbstab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gbstab {

double DensityHandle::integrate(const std::function<double(double)>& integrand,
                                double abs_tol, double rel_tol) const {
    if (unbounded_support)
        return quad::integrate_with_core(integrand, core_lo, core_hi, abs_tol, rel_tol);
    return quad::integrate(integrand, core_lo, core_hi, abs_tol, rel_tol);
}

double DensityHandle::mass() const {
    return integrate([this](double y) { return pdf(y); }, 1e-8, 1e-6);
}

void DensityHandle::check_mass(double tol) const {
    const double m = mass();
    if (std::abs(m - 1.0) > tol)
        throw std::invalid_argument("DensityHandle: mass " + std::to_string(m) +
                                    " not within tolerance of 1; refusing to renormalize");
}

double DensityHandle::ess_sup() const {
    if (sup_bound) return *sup_bound;
    constexpr int kGridPoints = 4096;
    double best = 0.0;
    const double step = (core_hi - core_lo) / (kGridPoints - 1);
    for (int i = 0; i < kGridPoints; ++i) best = std::max(best, pdf(core_lo + i * step));
    return best * 1.001;
}

DensityHandle make_handle(const ContinuousModel& model) {
    DensityHandle h;
    h.pdf = [model](double y) { return model.density(y); };
    const auto [lo, hi] = model.core_interval();
    h.core_lo = lo;
    h.core_hi = hi;
    h.unbounded_support = true;
    h.sup_bound = model.density_sup_bound();
    return h;
}

namespace {

DensityHandle joint_support(const DensityHandle& p, const DensityHandle& q) {
    DensityHandle h = p;
    h.core_lo = std::min(p.core_lo, q.core_lo);
    h.core_hi = std::max(p.core_hi, q.core_hi);
    h.unbounded_support = p.unbounded_support || q.unbounded_support;
    return h;
}

}  // namespace

double tvd(const DensityHandle& p, const DensityHandle& q) {
    p.check_mass();
    q.check_mass();
    const DensityHandle dom = joint_support(p, q);
    const double l1 = dom.integrate(
        [&](double y) { return std::abs(p.pdf(y) - q.pdf(y)); }, 1e-6, 1e-6);
    return 0.5 * l1;
}

double tvd(const ContinuousModel& p, const ContinuousModel& q) {
    return tvd(make_handle(p), make_handle(q));
}

double tvd_binary(double p_one, double q_one) {
    if (!(p_one >= 0.0 && p_one <= 1.0 && q_one >= 0.0 && q_one <= 1.0))
        throw std::invalid_argument("tvd_binary: probabilities outside [0,1]");
    return std::abs(p_one - q_one);
}

double kld(const DensityHandle& p, const DensityHandle& q) {
    p.check_mass();
    q.check_mass();
    const DensityHandle dom = joint_support(p, q);
    return dom.integrate(
        [&](double y) {
            const double py = p.pdf(y);
            if (py <= 0.0) return 0.0;
            const double qy = q.pdf(y);
            if (qy <= 0.0) {
                if (py > 1e-12)
                    throw std::domain_error("kld: support violation, q vanishes where p > 0");
                return 0.0;
            }
            return py * std::log(py / qy);
        },
        1e-10, 1e-8);
}

double beta_divergence(const DensityHandle& p, const DensityHandle& q, double beta) {
    if (!(beta > 1.0 && beta <= 2.0))
        throw std::domain_error("beta_divergence: beta must lie in (1,2]");
    p.check_mass();
    q.check_mass();
    const DensityHandle dom = joint_support(p, q);
    const double int_p = dom.integrate([&](double y) { return std::pow(p.pdf(y), beta); });
    const double int_q = dom.integrate([&](double y) { return std::pow(q.pdf(y), beta); });
    const double cross =
        dom.integrate([&](double y) { return p.pdf(y) * std::pow(q.pdf(y), beta - 1.0); });
    return int_p / (beta * (beta - 1.0)) + int_q / beta - cross / (beta - 1.0);
}

double gamma_divergence(const DensityHandle& p, const DensityHandle& q, double gamma) {
    if (!(gamma > 1.0)) throw std::domain_error("gamma_divergence: gamma must exceed 1");
    p.check_mass();
    const DensityHandle dom = joint_support(p, q);
    const double int_p = dom.integrate([&](double y) { return std::pow(p.pdf(y), gamma); });
    const double int_q = dom.integrate([&](double y) { return std::pow(q.pdf(y), gamma); });
    const double cross =
        dom.integrate([&](double y) { return p.pdf(y) * std::pow(q.pdf(y), gamma - 1.0); });
    return (std::pow(int_p, 1.0 / gamma) - cross * std::pow(int_q, -(gamma - 1.0) / gamma)) /
           (gamma * (gamma - 1.0));
}

double energy_distance(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("energy_distance: empty sample");
    std::vector<double> x(xs.begin(), xs.end());
    std::vector<double> y(ys.begin(), ys.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());

    // mean |a_i - a_j| over i != j from the sorted order
    const auto within = [](const std::vector<double>& a) {
        const std::size_t n = a.size();
        if (n < 2) return 0.0;
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            s += a[k] * (2.0 * static_cast<double>(k) - static_cast<double>(n) + 1.0);
        return 2.0 * s / (static_cast<double>(n) * static_cast<double>(n - 1));
    };

    // mean |x_i - y_j| via a sorted merge with running prefix sums
    const auto between = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        double prefix_a = 0.0;
        std::size_t ia = 0;
        const double total_a = std::accumulate(a.begin(), a.end(), 0.0);
        for (double v : b) {
            while (ia < a.size() && a[ia] <= v) prefix_a += a[ia++];
            // a[0..ia) <= v < a[ia..)
            s += static_cast<double>(ia) * v - prefix_a;
            s += (total_a - prefix_a) - static_cast<double>(a.size() - ia) * v;
        }
        return s / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    };

    return 2.0 * between(x, y) - within(x) - within(y);
}

InfluenceCurve influence_function(const ContinuousModel& model, const LossSpec& loss,
                                  std::size_t param_index, std::span<const double> y_grid) {
    const bool analytic = model.family() != ContinuousFamily::GaussianMixture &&
                          loss.family != LossFamily::GammaD;
    if (!analytic) return influence_function_fd(model, loss, param_index, y_grid);
    InfluenceCurve curve;
    curve.y.assign(y_grid.begin(), y_grid.end());
    curve.value.reserve(y_grid.size());
    for (double y : y_grid) curve.value.push_back(loss_gradient(model, y, loss, param_index));
    return curve;
}

InfluenceCurve influence_function_fd(const ContinuousModel& model, const LossSpec& loss,
                                     std::size_t param_index, std::span<const double> y_grid) {
    std::vector<double> params = model.params();
    if (param_index >= params.size())
        throw std::invalid_argument("influence_function: param_index out of range");
    const double h = 1e-5 * std::max(1.0, std::abs(params[param_index]));
    std::vector<double> up = params, dn = params;
    up[param_index] += h;
    dn[param_index] -= h;
    const ContinuousModel m_up = model.with_params(up);
    const ContinuousModel m_dn = model.with_params(dn);
    InfluenceCurve curve;
    curve.y.assign(y_grid.begin(), y_grid.end());
    curve.value.reserve(y_grid.size());
    for (double y : y_grid)
        curve.value.push_back((point_loss(m_up, y, loss) - point_loss(m_dn, y, loss)) / (2.0 * h));
    return curve;
}

}  // namespace gbstab
