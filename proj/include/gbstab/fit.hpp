#pragma once

#include "gbstab/losses.hpp"
#include "gbstab/models.hpp"
#include "gbstab/priors.hpp"
#include "gbstab/sampler.hpp"

#include <memory>
#include <optional>
#include <variant>

namespace gbstab {

/// Observations plus the design matrix for regression/binary problems.
struct FitData {
    std::vector<double> y;
    std::optional<Matrix> X;
};

/// Everything that defines one generalized-posterior fit. The model instance
/// acts as a template: its fixed hyperparameters (sigma2_adj, nu, t, ...)
/// are kept, its free parameters are sampled. Positivity is handled by log
/// reparameterization and the mixture simplex by stick-breaking, with the
/// Jacobians included in the target.
struct FitProblem {
    std::variant<ContinuousModel, RegressionModel, BinaryModel> model;
    PriorSpec prior;
    LossSpec loss;
    /// Location-scale families only: hold sigma2 at the template value
    /// (known-variance fits).
    bool fix_sigma2 = false;
};

std::unique_ptr<LogTarget> make_target(const FitProblem& problem, const FitData& data);

PosteriorDraws run_mcmc(const FitProblem& problem, const FitData& data, const SamplerConfig& cfg);

/// Derivative-free minimizer of the total loss, returned on the constrained
/// scale. Falls back to a prior draw (seeded) with `fallback` set when the
/// optimizer fails to beat the prior reference point.
std::vector<double> loss_minimizer_init(const FitProblem& problem, const FitData& data,
                                        bool* fallback = nullptr, std::uint64_t fallback_seed = 0);

}  // namespace gbstab
