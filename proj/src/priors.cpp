#include "gbstab/priors.hpp"

#include "gbstab/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gbstab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
}  // namespace

double inv_gamma_log_density(double x, double shape, double scale) {
    if (!(x > 0.0)) return kNegInf;
    return shape * std::log(scale) - special::log_gamma(shape) - (shape + 1.0) * std::log(x) -
           scale / x;
}

double dirichlet_log_density(std::span<const double> alpha, std::span<const double> weights) {
    if (alpha.size() != weights.size())
        throw std::invalid_argument("dirichlet_log_density: dimension mismatch");
    double alpha_sum = 0.0, lp = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        if (!(alpha[k] > 0.0)) throw std::invalid_argument("dirichlet: alpha must be positive");
        if (!(weights[k] > 0.0)) return kNegInf;
        alpha_sum += alpha[k];
        lp += (alpha[k] - 1.0) * std::log(weights[k]) - special::log_gamma(alpha[k]);
    }
    return lp + special::log_gamma(alpha_sum);
}

double prior_log_density(const NIGPrior& prior, double mu, double sigma2) {
    if (!(sigma2 > 0.0)) return kNegInf;
    const double v = prior.v0 * sigma2;
    const double lp_mu = -0.5 * (kLogTwoPi + std::log(v)) - (mu - prior.mu0) * (mu - prior.mu0) / (2.0 * v);
    return lp_mu + inv_gamma_log_density(sigma2, prior.a0, prior.b0);
}

double prior_log_density(const MixturePrior& prior, std::span<const double> weights,
                         std::span<const double> means, std::span<const double> scales) {
    const std::size_t k = weights.size();
    if (means.size() != k || scales.size() != k)
        throw std::invalid_argument("mixture prior: component count mismatch");
    const std::vector<double> alpha(k, prior.alpha);
    double lp = dirichlet_log_density(alpha, weights);
    for (std::size_t i = 0; i < k; ++i) {
        if (!(scales[i] > 0.0)) return kNegInf;
        const double s2 = scales[i] * scales[i];
        lp += inv_gamma_log_density(s2, 0.5 * prior.nu0, 0.5 * prior.S0);
        const double v = prior.kappa * s2;
        lp += -0.5 * (kLogTwoPi + std::log(v)) - means[i] * means[i] / (2.0 * v);
    }
    return lp;
}

double prior_log_density(const GaussianCoefPrior& prior, std::span<const double> coef) {
    double lp = 0.0;
    for (double c : coef) {
        const double z = (c - prior.mean) / prior.sd;
        lp += -0.5 * (kLogTwoPi + 2.0 * std::log(prior.sd)) - 0.5 * z * z;
    }
    return lp;
}

double elicit_dirichlet_concentration(int K, double threshold, double target) {
    if (K < 2) throw std::invalid_argument("elicit_dirichlet_concentration: K must be >= 2");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("elicit_dirichlet_concentration: threshold outside (0,1)");
    if (!(target > 0.0 && target < 1.0))
        throw std::invalid_argument("elicit_dirichlet_concentration: target outside (0,1)");

    const auto criterion = [&](double a) {
        return 1.0 - special::beta_cdf(threshold, a, (K - 1) * a);
    };
    constexpr double kTol = 1e-4;
    if (std::abs(criterion(1.0) - target) <= kTol) return 1.0;

    // criterion is increasing in a for threshold < 1/K
    double lo = 1e-4, hi = 1e4;
    if ((criterion(lo) - target) * (criterion(hi) - target) > 0.0)
        throw std::runtime_error("elicit_dirichlet_concentration: root not bracketed");
    for (int iter = 0; iter < 300; ++iter) {
        const double mid = std::sqrt(lo * hi);
        if (criterion(mid) < target)
            lo = mid;
        else
            hi = mid;
        if (std::abs(criterion(mid) - target) <= kTol * 0.1) break;
    }
    const double a = std::sqrt(lo * hi);
    if (std::abs(criterion(a) - target) > kTol)
        throw std::runtime_error("elicit_dirichlet_concentration: bisection did not converge");
    return a;
}

}  // namespace gbstab
