#pragma once

#include "gbstab/models.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace gbstab {

enum class LossFamily { LogScore, BetaD, GammaD };

/// Loss defining the generalized posterior: negative log score, the
/// beta-divergence loss, or the gamma-divergence loss. `weight` is the
/// general-Bayes calibration w. Divergence parameters outside (1, 2] are
/// accepted with a warning (the stability guarantees assume 1 < beta <= 2).
struct LossSpec {
    LossFamily family = LossFamily::LogScore;
    double divergence_param = 1.5;
    double weight = 1.0;

    void validate() const;
    /// Non-empty when validate() would warn (e.g. beta outside (1,2]).
    std::optional<std::string> warning() const;

    static LossSpec log_score(double w = 1.0) { return {LossFamily::LogScore, 1.0, w}; }
    static LossSpec beta_d(double beta, double w = 1.0) { return {LossFamily::BetaD, beta, w}; }
    static LossSpec gamma_d(double gamma, double w = 1.0) { return {LossFamily::GammaD, gamma, w}; }
};

std::string to_string(LossFamily f);

/// Integral of the model density raised to `exponent`. Gaussian and
/// Student-t use closed forms; mixtures use adaptive quadrature; the
/// quadrature route is always available as the reference path.
double power_integral(const ContinuousModel& model, double exponent);
double power_integral_quadrature(const ContinuousModel& model, double exponent);

/// Closed forms where they exist (Gaussian always; Student-t for
/// exponent * (nu + 1) > 1).
double gaussian_power_integral(double variance, double exponent);
double student_t_power_integral(double sigma2, double nu, double exponent);

/// Two-outcome power sum p^e + (1-p)^e for binary models at a given x.
double binary_power_sum(double prob_one, double exponent);

/// Memoized quadrature power integrals, keyed on (family, scale parameters,
/// exponent); locations are excluded from the key since the integral of a
/// location family does not depend on them (guarded by a test). Entries for
/// mixtures are not cached: every parameter moves the integral.
class PowerIntegralCache {
public:
    double lookup_or_compute(const ContinuousModel& model, double exponent);
    std::size_t size() const;

private:
    using Key = std::tuple<int, double, double, double>;  // family, scale, shape, exponent
    mutable std::mutex mu_;
    std::map<Key, double> cache_;
};

// Per-observation losses.
double log_score_loss(const ContinuousModel& model, double y);
double beta_loss(const ContinuousModel& model, double y, double beta);
double gamma_loss(const ContinuousModel& model, double y, double gamma);
double point_loss(const ContinuousModel& model, double y, const LossSpec& loss);

// Binary counterparts; `label` is 0/1.
double log_score_loss(const BinaryModel& model, std::span<const double> x, int label);
double beta_loss(const BinaryModel& model, std::span<const double> x, int label, double beta);
double gamma_loss(const BinaryModel& model, std::span<const double> x, int label, double gamma);

/// w * sum_i loss(theta, y_i).
double total_loss(const ContinuousModel& model, std::span<const double> ys, const LossSpec& loss);
double total_loss(const RegressionModel& model, std::span<const double> ys, const LossSpec& loss);
double total_loss(const BinaryModel& model, const Matrix& X, std::span<const double> labels,
                  const LossSpec& loss);

/// Analytic gradient of the per-observation loss with respect to (mu, sigma2)
/// for Gaussian/Student-t models under LogScore or BetaD.
/// Index 0 = mu, 1 = sigma2.
double loss_gradient(const ContinuousModel& model, double y, const LossSpec& loss,
                     std::size_t param_index);

}  // namespace gbstab
