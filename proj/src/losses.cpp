#include "gbstab/losses.hpp"

#include "gbstab/quadrature.hpp"
#include "gbstab/special.hpp"

#include <cmath>
#include <stdexcept>

namespace gbstab {

void LossSpec::validate() const {
    if (!(weight > 0.0)) throw std::invalid_argument("LossSpec: weight w must be positive");
    if (family != LossFamily::LogScore && !(divergence_param > 1.0))
        throw std::invalid_argument("LossSpec: divergence parameter must exceed 1");
}

std::optional<std::string> LossSpec::warning() const {
    if (family == LossFamily::BetaD && divergence_param > 2.0)
        return "beta outside (1,2]: the stability bounds assume 1 < beta <= 2";
    return std::nullopt;
}

std::string to_string(LossFamily f) {
    switch (f) {
        case LossFamily::LogScore: return "logscore";
        case LossFamily::BetaD: return "betaD";
        case LossFamily::GammaD: return "gammaD";
    }
    return "?";
}

double gaussian_power_integral(double variance, double exponent) {
    return std::pow(exponent, -0.5) * std::pow(2.0 * M_PI * variance, 0.5 * (1.0 - exponent));
}

double student_t_power_integral(double sigma2, double nu, double exponent) {
    const double a = 0.5 * exponent * (nu + 1.0);
    if (!(a > 0.5)) throw std::domain_error("student_t_power_integral: exponent too small");
    const double log_c = special::log_gamma(0.5 * (nu + 1.0)) - special::log_gamma(0.5 * nu) -
                         0.5 * std::log(nu * M_PI);
    const double log_val = exponent * log_c + 0.5 * (1.0 - exponent) * std::log(sigma2) +
                           0.5 * std::log(nu * M_PI) + special::log_gamma(a - 0.5) -
                           special::log_gamma(a);
    return std::exp(log_val);
}

double power_integral_quadrature(const ContinuousModel& model, double exponent) {
    if (!(exponent > 1.0)) throw std::domain_error("power_integral: exponent must exceed 1");
    const auto [lo, hi] = model.core_interval();
    return quad::integrate_with_core(
        [&](double y) { return std::pow(model.density(y), exponent); }, lo, hi);
}

double power_integral(const ContinuousModel& model, double exponent) {
    if (!(exponent > 1.0)) throw std::domain_error("power_integral: exponent must exceed 1");
    switch (model.family()) {
        case ContinuousFamily::Gaussian:
            return gaussian_power_integral(model.variance_param(), exponent);
        case ContinuousFamily::StudentT:
            return student_t_power_integral(model.sigma2(), model.nu(), exponent);
        case ContinuousFamily::GaussianMixture:
            return power_integral_quadrature(model, exponent);
    }
    throw std::logic_error("power_integral: unknown family");
}

double binary_power_sum(double prob_one, double exponent) {
    return std::pow(prob_one, exponent) + std::pow(1.0 - prob_one, exponent);
}

double PowerIntegralCache::lookup_or_compute(const ContinuousModel& model, double exponent) {
    if (model.family() == ContinuousFamily::GaussianMixture)
        return power_integral(model, exponent);
    const Key key{static_cast<int>(model.family()), model.sigma2(),
                  model.family() == ContinuousFamily::Gaussian ? model.sigma2_adj() : model.nu(),
                  exponent};
    {
        std::lock_guard lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    const double value = power_integral(model, exponent);
    std::lock_guard lock(mu_);
    cache_.emplace(key, value);
    return value;
}

std::size_t PowerIntegralCache::size() const {
    std::lock_guard lock(mu_);
    return cache_.size();
}

double log_score_loss(const ContinuousModel& model, double y) { return -model.log_density(y); }

double beta_loss(const ContinuousModel& model, double y, double beta) {
    const double integral = power_integral(model, beta);
    const double f_pow = std::exp((beta - 1.0) * model.log_density(y));
    return -f_pow / (beta - 1.0) + integral / beta;
}

double gamma_loss(const ContinuousModel& model, double y, double gamma) {
    const double integral = power_integral(model, gamma);
    const double f_pow = std::exp((gamma - 1.0) * model.log_density(y));
    return -f_pow / (gamma - 1.0) / gamma * std::pow(integral, -(gamma - 1.0) / gamma);
}

double point_loss(const ContinuousModel& model, double y, const LossSpec& loss) {
    switch (loss.family) {
        case LossFamily::LogScore: return log_score_loss(model, y);
        case LossFamily::BetaD: return beta_loss(model, y, loss.divergence_param);
        case LossFamily::GammaD: return gamma_loss(model, y, loss.divergence_param);
    }
    throw std::logic_error("point_loss: unknown loss family");
}

double log_score_loss(const BinaryModel& model, std::span<const double> x, int label) {
    return -std::log(model.class_probability(x, label));
}

double beta_loss(const BinaryModel& model, std::span<const double> x, int label, double beta) {
    const double p1 = model.class_probability(x, 1);
    const double p = label == 1 ? p1 : 1.0 - p1;
    return -std::pow(p, beta - 1.0) / (beta - 1.0) + binary_power_sum(p1, beta) / beta;
}

double gamma_loss(const BinaryModel& model, std::span<const double> x, int label, double gamma) {
    const double p1 = model.class_probability(x, 1);
    const double p = label == 1 ? p1 : 1.0 - p1;
    return -std::pow(p, gamma - 1.0) / (gamma - 1.0) / gamma *
           std::pow(binary_power_sum(p1, gamma), -(gamma - 1.0) / gamma);
}

double total_loss(const ContinuousModel& model, std::span<const double> ys, const LossSpec& loss) {
    loss.validate();
    double sum = 0.0;
    switch (loss.family) {
        case LossFamily::LogScore:
            for (double y : ys) sum -= model.log_density(y);
            break;
        case LossFamily::BetaD: {
            const double beta = loss.divergence_param;
            const double integral_term = power_integral(model, beta) / beta;
            for (double y : ys)
                sum += -std::exp((beta - 1.0) * model.log_density(y)) / (beta - 1.0) + integral_term;
            break;
        }
        case LossFamily::GammaD: {
            const double gamma = loss.divergence_param;
            const double adj = std::pow(power_integral(model, gamma), -(gamma - 1.0) / gamma) / gamma;
            for (double y : ys)
                sum += -std::exp((gamma - 1.0) * model.log_density(y)) / (gamma - 1.0) * adj;
            break;
        }
    }
    return loss.weight * sum;
}

double total_loss(const RegressionModel& model, std::span<const double> ys, const LossSpec& loss) {
    loss.validate();
    if (ys.size() != model.n()) throw std::invalid_argument("total_loss: response length mismatch");
    std::vector<double> resid(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) resid[i] = ys[i] - model.fitted(i);
    return total_loss(model.residual_model(), resid, loss);
}

double total_loss(const BinaryModel& model, const Matrix& X, std::span<const double> labels,
                  const LossSpec& loss) {
    loss.validate();
    if (labels.size() != X.rows()) throw std::invalid_argument("total_loss: label length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const int label = labels[i] > 0.5 ? 1 : 0;
        switch (loss.family) {
            case LossFamily::LogScore: sum += log_score_loss(model, X.row(i), label); break;
            case LossFamily::BetaD:
                sum += beta_loss(model, X.row(i), label, loss.divergence_param);
                break;
            case LossFamily::GammaD:
                sum += gamma_loss(model, X.row(i), label, loss.divergence_param);
                break;
        }
    }
    return loss.weight * sum;
}

namespace {

/// d log f / d(mu, sigma2) for the location-scale families.
double log_density_gradient(const ContinuousModel& model, double y, std::size_t param_index) {
    const double mu = model.mu();
    const double s2 = model.sigma2();
    const double d = y - mu;
    if (model.family() == ContinuousFamily::Gaussian) {
        const double v = model.variance_param();
        if (param_index == 0) return d / v;
        return -0.5 / s2 + d * d / (2.0 * s2 * v);
    }
    const double nu = model.nu();
    const double denom = nu * s2 + d * d;
    if (param_index == 0) return (nu + 1.0) * d / denom;
    return -0.5 / s2 + (nu + 1.0) * d * d / (2.0 * s2 * denom);
}

}  // namespace

double loss_gradient(const ContinuousModel& model, double y, const LossSpec& loss,
                     std::size_t param_index) {
    if (model.family() == ContinuousFamily::GaussianMixture)
        throw std::invalid_argument("loss_gradient: analytic form only for location-scale families");
    if (param_index > 1) throw std::invalid_argument("loss_gradient: param_index out of range");
    const double dlogf = log_density_gradient(model, y, param_index);
    switch (loss.family) {
        case LossFamily::LogScore:
            return -dlogf;
        case LossFamily::BetaD: {
            const double beta = loss.divergence_param;
            const double f_pow = std::exp((beta - 1.0) * model.log_density(y));
            double grad = -f_pow * dlogf;
            if (param_index == 1) {
                // location-scale power integral is const * (sigma2)^((1-beta)/2)
                const double integral = power_integral(model, beta);
                grad += integral * (1.0 - beta) / (2.0 * beta * model.sigma2());
            }
            return grad;
        }
        case LossFamily::GammaD:
            throw std::invalid_argument("loss_gradient: gammaD uses the finite-difference path");
    }
    throw std::logic_error("loss_gradient: unknown loss family");
}

}  // namespace gbstab
