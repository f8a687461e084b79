#pragma once

#include "gbstab/matrix.hpp"
#include "gbstab/rng.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gbstab {

enum class ContinuousFamily { Gaussian, StudentT, GaussianMixture };

/// One-dimensional parametric density. Immutable after construction; all
/// evaluations are pure, so instances can be shared across threads.
///
/// Gaussian:        N(y; mu, sigma2 * sigma2_adj), sigma2_adj a fixed
///                  variance adjustment.
/// StudentT:        t_nu(y; mu, sigma2), sigma2 the squared scale, nu fixed.
/// GaussianMixture: sum_k w_k N(y; mean_k, scale_k^2), scales floored at
///                  scale_floor so the density stays uniformly bounded.
class ContinuousModel {
public:
    static ContinuousModel gaussian(double mu, double sigma2, double sigma2_adj = 1.0);
    static ContinuousModel student_t(double mu, double sigma2, double nu = 5.0);
    static ContinuousModel mixture(std::vector<double> weights, std::vector<double> means,
                                   std::vector<double> scales, double scale_floor = 1e-3);

    ContinuousFamily family() const { return family_; }

    double log_density(double y) const;
    /// exp(log_density), flushed to 0 below exp(-700) to avoid underflow noise.
    double density(double y) const;
    double cdf(double y) const;

    double sample_one(Rng& rng) const;
    std::vector<double> sample(std::size_t n, Rng& rng) const;

    /// Interval holding all but a negligible fraction of the mass; tails
    /// outside it are integrated with the infinite-range transform.
    std::pair<double, double> core_interval() const;

    /// Analytic upper bound on the density's essential supremum.
    double density_sup_bound() const;

    double mean() const;

    // Location-scale accessors (Gaussian / StudentT only).
    double mu() const;
    double sigma2() const;
    /// Full variance parameter of the Gaussian (sigma2 * sigma2_adj);
    /// squared scale for StudentT.
    double variance_param() const;
    double sigma2_adj() const { return sigma2_adj_; }
    double nu() const { return nu_; }

    // Mixture accessors.
    std::size_t n_components() const { return weights_.size(); }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& means() const { return means_; }
    const std::vector<double>& scales() const { return scales_; }
    double scale_floor() const { return scale_floor_; }

    /// Flattened free-parameter vector and names:
    /// Gaussian/StudentT: (mu, sigma2); mixture: (w_1..w_K, mu_1..mu_K, s_1..s_K).
    std::vector<double> params() const;
    std::vector<std::string> param_names() const;
    /// Rebuild with new free parameters, keeping fixed hyperparameters
    /// (sigma2_adj, nu, scale_floor).
    ContinuousModel with_params(std::span<const double> params) const;

private:
    ContinuousModel() = default;
    void refresh_constants();

    ContinuousFamily family_ = ContinuousFamily::Gaussian;
    double mu_ = 0.0, sigma2_ = 1.0, sigma2_adj_ = 1.0, nu_ = 5.0;
    std::vector<double> weights_, means_, scales_;
    double scale_floor_ = 1e-3;
    // cached per-instance constants
    double log_norm_ = 0.0;                 // location-scale normalizing constant
    std::vector<double> comp_log_norm_;     // per-component log(w_k) - log(s_k sqrt(2 pi))
};

/// Deterministic sampling front end: n draws from the model under a fresh
/// stream seeded with `seed`.
std::vector<double> sample(const ContinuousModel& model, std::size_t n, std::uint64_t seed);

/// Linear regression with location-scale residuals: y_i ~ resid(x_i . coef, sigma2).
class RegressionModel {
public:
    RegressionModel(Matrix design, ContinuousFamily residual_family, std::vector<double> coef,
                    double sigma2, double sigma2_adj = 1.0, double nu = 5.0);

    std::size_t n() const { return design_.rows(); }
    std::size_t p() const { return design_.cols(); }
    const Matrix& design() const { return design_; }
    const std::vector<double>& coef() const { return coef_; }
    double sigma2() const { return residual_.sigma2(); }
    ContinuousFamily residual_family() const { return residual_.family(); }

    double fitted(std::size_t i) const { return dot(design_.row(i), coef_); }
    /// Density of observation y at row i: the residual density at y - x_i.coef.
    double density(std::size_t i, double y) const { return residual_.density(y - fitted(i)); }
    double log_density(std::size_t i, double y) const { return residual_.log_density(y - fitted(i)); }

    /// Residual model centred at 0 (location-free; carries sigma2 and the
    /// fixed hyperparameters).
    const ContinuousModel& residual_model() const { return residual_; }

    std::vector<double> sample(Rng& rng) const;

private:
    Matrix design_;
    std::vector<double> coef_;
    ContinuousModel residual_;
};

enum class BinaryFamily { Logistic, Probit, TLogistic, Mislabelled };

/// Default heaviness parameter for the t-logistic link.
inline constexpr double kDefaultTLogisticT = 1.5;

/// Binary classifier P(y = 1 | x). The probit and t-logistic links apply a
/// scalar multiplier w_link to the linear score before the link, which is how
/// their parameters are matched to the logistic baseline.
class BinaryModel {
public:
    static BinaryModel logistic(std::vector<double> coef);
    static BinaryModel probit(std::vector<double> coef, double w_link = 1.0);
    static BinaryModel t_logistic(std::vector<double> coef, double t = kDefaultTLogisticT,
                                  double w_link = 1.0);
    static BinaryModel mislabelled(std::vector<double> coef, double nu0, double nu1);

    BinaryFamily family() const { return family_; }
    const std::vector<double>& coef() const { return coef_; }
    double t() const { return t_; }
    double nu0() const { return nu0_; }
    double nu1() const { return nu1_; }
    double w_link() const { return w_link_; }

    /// P(y = 1) as a function of the linear score x . coef.
    double prob_one_score(double score) const;
    double class_probability(std::span<const double> x, int label) const;

    BinaryModel with_coef(std::vector<double> coef) const;

private:
    BinaryModel() = default;
    BinaryFamily family_ = BinaryFamily::Logistic;
    std::vector<double> coef_;
    double t_ = kDefaultTLogisticT;
    double nu0_ = 0.0, nu1_ = 0.0;
    double w_link_ = 1.0;
};

}  // namespace gbstab
