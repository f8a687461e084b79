#pragma once

#include "gbstab/models.hpp"
#include "gbstab/rng.hpp"

#include <span>
#include <variant>
#include <vector>

namespace gbstab {

/// Normal-inverse-gamma over (mu, sigma2):
///   mu | sigma2 ~ N(mu0, v0 * sigma2),  sigma2 ~ IG(a0, b0).
/// For regression the coefficients are iid N(mu0, v0 * sigma2).
struct NIGPrior {
    double a0 = 0.01;
    double b0 = 0.01;
    double mu0 = 0.0;
    double v0 = 10.0;
};

/// Mixture prior: weights ~ Dir(alpha, ..., alpha); per component
/// sigma_k^2 ~ IG(nu0/2, S0/2) and mu_k | sigma_k ~ N(0, kappa * sigma_k^2).
struct MixturePrior {
    double alpha = 1.0;
    double nu0 = 5.0;
    double S0 = 0.2;
    double kappa = 5.68;
};

/// Independent N(mean, sd^2) on each coefficient (binary classifiers).
struct GaussianCoefPrior {
    double mean = 0.0;
    double sd = 5.0;
};

using PriorSpec = std::variant<NIGPrior, MixturePrior, GaussianCoefPrior>;

double inv_gamma_log_density(double x, double shape, double scale);
double dirichlet_log_density(std::span<const double> alpha, std::span<const double> weights);

/// Log prior density at the model's current parameters; -inf outside the
/// support rather than an error.
double prior_log_density(const NIGPrior& prior, double mu, double sigma2);
double prior_log_density(const MixturePrior& prior, std::span<const double> weights,
                         std::span<const double> means, std::span<const double> scales);
double prior_log_density(const GaussianCoefPrior& prior, std::span<const double> coef);

/// Concentration a such that P(omega_1 > threshold) = target for
/// omega_1 ~ Beta(a, (K-1)a), the first margin of a symmetric Dirichlet.
/// Solved by bisection to within 1e-4 on the probability scale.
double elicit_dirichlet_concentration(int K, double threshold, double target);

}  // namespace gbstab
