#pragma once

#include "gbstab/losses.hpp"
#include "gbstab/models.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gbstab {

/// A one-dimensional density for the divergence estimators: an evaluation
/// callable, a support hint (finite interval or the real line plus a core
/// window for the quadrature), and an optional essential-supremum bound.
struct DensityHandle {
    std::function<double(double)> pdf;
    double core_lo = -30.0;
    double core_hi = 30.0;
    bool unbounded_support = true;  // false: support is exactly [core_lo, core_hi]
    std::optional<double> sup_bound;

    double integrate(const std::function<double(double)>& integrand,
                     double abs_tol = 1e-10, double rel_tol = 1e-8) const;
    /// Total mass; handles that cannot certify unit mass within `tol` are
    /// rejected by the divergence estimators rather than renormalized.
    double mass() const;
    void check_mass(double tol = 1e-4) const;

    /// Essential supremum: the declared bound if present, otherwise a dense
    /// grid maximum inflated by a small safety factor.
    double ess_sup() const;
};

DensityHandle make_handle(const ContinuousModel& model);

enum class DivergenceEstimator { Quadrature, DiscreteSum, SampleBased };

struct DivergenceResult {
    double value = 0.0;
    DivergenceEstimator estimator = DivergenceEstimator::Quadrature;
    double achieved_tol = 0.0;
};

/// Total variation distance (1/2) * int |p - q|.
double tvd(const DensityHandle& p, const DensityHandle& q);
double tvd(const ContinuousModel& p, const ContinuousModel& q);
/// Two-outcome TVD |p1 - q1| for binary models.
double tvd_binary(double p_one, double q_one);

/// Kullback-Leibler divergence int p log(p/q). Throws if q vanishes where p
/// still carries mass.
double kld(const DensityHandle& p, const DensityHandle& q);

/// Beta divergence of order beta in (1, 2].
double beta_divergence(const DensityHandle& p, const DensityHandle& q, double beta);

/// Gamma divergence; invariant under rescaling of q's evaluator.
double gamma_divergence(const DensityHandle& p, const DensityHandle& q, double gamma);

/// Energy distance 2 E|X-Y| - E|X-X'| - E|Y-Y'| with U-statistic
/// (off-diagonal) means; computed exactly in O((n+m) log(n+m)).
double energy_distance(std::span<const double> xs, std::span<const double> ys);

struct InfluenceCurve {
    std::vector<double> y;
    std::vector<double> value;
};

/// Gradient of the per-observation loss at theta_hat as a function of the
/// observation (param_index 0 = mu, 1 = sigma2). Analytic where available,
/// central finite differences otherwise.
InfluenceCurve influence_function(const ContinuousModel& model_at_theta_hat, const LossSpec& loss,
                                  std::size_t param_index, std::span<const double> y_grid);

/// Finite-difference influence values (step 1e-5 relative), for cross-checks.
InfluenceCurve influence_function_fd(const ContinuousModel& model_at_theta_hat,
                                     const LossSpec& loss, std::size_t param_index,
                                     std::span<const double> y_grid);

}  // namespace gbstab
