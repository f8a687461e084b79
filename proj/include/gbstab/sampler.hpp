#pragma once

#include "gbstab/matrix.hpp"
#include "gbstab/rng.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gbstab {

struct SamplerConfig {
    int chains = 4;
    int iterations = 20000;
    int burn_in = 10000;
    int thin = 1;
    std::uint64_t seed = 0;
    /// Proposal-scale refresh cadence (iterations) during adaptation.
    int adapt_window = 50;
    double target_accept = 0.30;
    enum class Init { PriorDraw, UserPoint, LossMinimizer };
    Init init = Init::LossMinimizer;
    /// Constrained-space starting point for Init::UserPoint.
    std::vector<double> init_point;
    int threads = 1;

    void validate() const;
};

/// Post burn-in, thinned draws on the constrained parameter scale, with
/// per-draw chain/iteration bookkeeping and per-chain acceptance rates.
struct PosteriorDraws {
    std::vector<std::string> names;
    Matrix draws;  // S x d
    std::vector<int> chain_id;
    std::vector<int> iteration;
    std::vector<double> log_target;
    std::vector<double> accept_rate;
    bool rhat_warning = false;
    bool init_fallback_warning = false;

    std::size_t size() const { return draws.rows(); }
    std::size_t dim() const { return draws.cols(); }
    int n_chains() const { return static_cast<int>(accept_rate.size()); }

    std::vector<double> column(std::size_t j) const;
    double mean(std::size_t j) const;
    double sd(std::size_t j) const;
    std::vector<double> mean_params() const;

    /// Delimited text table: chain, iteration, parameters, log_target.
    std::string serialize_table() const;
    static PosteriorDraws parse_table(const std::string& text);
};

/// Log density of a generalized posterior over an unconstrained space.
/// log_density includes the prior, the transform Jacobian, and minus the
/// weighted total loss. Implementations must be safe for concurrent calls.
class LogTarget {
public:
    virtual ~LogTarget() = default;
    virtual std::size_t dim() const = 0;
    virtual std::vector<std::string> names() const = 0;
    virtual double log_density(std::span<const double> u) const = 0;
    /// The w * sum-of-losses part alone (no prior), for initialization.
    virtual double loss_only(std::span<const double> u) const = 0;
    virtual std::vector<double> to_constrained(std::span<const double> u) const = 0;
    virtual std::vector<double> from_constrained(std::span<const double> c) const = 0;
    virtual std::vector<double> prior_draw(Rng& rng) const = 0;
    /// Unconstrained image of the prior mean point (mode where the mean does
    /// not exist); baseline for judging the loss minimizer.
    virtual std::vector<double> reference_point() const = 0;
    /// Data-informed starting point for the loss minimizer.
    virtual std::vector<double> heuristic_start() const { return reference_point(); }
};

/// Adaptive random-walk Metropolis: diagonal Gaussian proposal whose global
/// scale follows a Robbins-Monro recursion toward target_accept and whose
/// per-coordinate scales track the running draw variances. Adaptation stops
/// at burn_in; chains are independent (seed + chain_id) and may run in
/// parallel without changing the draws.
PosteriorDraws run_mcmc(const LogTarget& target, const SamplerConfig& cfg);

struct ParamDiagnostics {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
    double split_rhat = 0.0;
    bool rhat_defined = false;
    double ess = 0.0;
    bool ess_defined = false;
    double mcse = 0.0;
};

struct Diagnostics {
    std::vector<ParamDiagnostics> params;
    bool rhat_warning = false;
    std::string serialize() const;
};

/// Split-Rhat, effective sample size and Monte Carlo standard error per
/// parameter. Rhat needs >= 2 chains.
Diagnostics diagnostics(const PosteriorDraws& draws);

/// Split-Rhat of one scalar sequence set; exposed for reuse on derived
/// quantities. Returns false in `defined` for degenerate chains.
double split_rhat(const std::vector<std::vector<double>>& chains, bool* defined);
double effective_sample_size(const std::vector<std::vector<double>>& chains, bool* defined);

}  // namespace gbstab
