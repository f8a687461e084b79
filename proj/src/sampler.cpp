#include "gbstab/sampler.hpp"

#include "gbstab/optim.hpp"
#include "gbstab/textio.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gbstab {

void SamplerConfig::validate() const {
    if (chains < 1) throw std::invalid_argument("sampler: chains must be >= 1");
    if (iterations < 1) throw std::invalid_argument("sampler: iterations must be >= 1");
    if (burn_in < 0 || burn_in >= iterations)
        throw std::invalid_argument("sampler: burn_in must lie in [0, iterations)");
    if (thin < 1) throw std::invalid_argument("sampler: thin must be >= 1");
    if (adapt_window < 1) throw std::invalid_argument("sampler: adapt_window must be >= 1");
    if (!(target_accept > 0.1 && target_accept < 0.6))
        throw std::invalid_argument("sampler: target_accept must lie in (0.1, 0.6)");
    if (init == Init::UserPoint && init_point.empty())
        throw std::invalid_argument("sampler: UserPoint init requires init_point");
}

std::vector<double> PosteriorDraws::column(std::size_t j) const {
    std::vector<double> c(size());
    for (std::size_t i = 0; i < size(); ++i) c[i] = draws(i, j);
    return c;
}

double PosteriorDraws::mean(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += draws(i, j);
    return s / static_cast<double>(size());
}

double PosteriorDraws::sd(std::size_t j) const {
    const double m = mean(j);
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        const double d = draws(i, j) - m;
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(size() - 1));
}

std::vector<double> PosteriorDraws::mean_params() const {
    std::vector<double> m(dim());
    for (std::size_t j = 0; j < dim(); ++j) m[j] = mean(j);
    return m;
}

std::string PosteriorDraws::serialize_table() const {
    TextTable table;
    table.header = {"chain", "iteration"};
    table.header.insert(table.header.end(), names.begin(), names.end());
    table.header.push_back("log_target");
    for (std::size_t i = 0; i < size(); ++i) {
        std::vector<std::string> row;
        row.reserve(dim() + 3);
        row.push_back(format_int(chain_id[i]));
        row.push_back(format_int(iteration[i]));
        for (std::size_t j = 0; j < dim(); ++j) row.push_back(format_double(draws(i, j)));
        row.push_back(format_double(log_target[i]));
        table.add_row(std::move(row));
    }
    return table.serialize();
}

PosteriorDraws PosteriorDraws::parse_table(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("draws table: empty input");
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, '\t')) header.push_back(cell);
    }
    if (header.size() < 3 || header[0] != "chain" || header[1] != "iteration" ||
        header.back() != "log_target")
        throw std::invalid_argument("draws table: unexpected header");
    PosteriorDraws out;
    out.names.assign(header.begin() + 2, header.end() - 1);
    const std::size_t d = out.names.size();
    std::vector<double> flat;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, '\t')) cells.push_back(cell);
        if (cells.size() != d + 3) throw std::invalid_argument("draws table: ragged row");
        out.chain_id.push_back(std::stoi(cells[0]));
        out.iteration.push_back(std::stoi(cells[1]));
        for (std::size_t j = 0; j < d; ++j) flat.push_back(std::stod(cells[2 + j]));
        out.log_target.push_back(std::stod(cells[d + 2]));
    }
    const std::size_t s = out.chain_id.size();
    out.draws = Matrix(s, d);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < d; ++j) out.draws(i, j) = flat[i * d + j];
    const int max_chain =
        s ? *std::max_element(out.chain_id.begin(), out.chain_id.end()) : -1;
    out.accept_rate.assign(static_cast<std::size_t>(max_chain + 1), 0.0);
    return out;
}

namespace {

struct ChainResult {
    std::vector<std::vector<double>> constrained;
    std::vector<double> log_target;
    std::vector<int> iteration;
    double accept_rate = 0.0;
};

ChainResult run_chain(const LogTarget& target, const SamplerConfig& cfg, int chain,
                      const std::vector<double>& init_u) {
    const std::size_t d = target.dim();
    Rng rng(cfg.seed + static_cast<std::uint64_t>(chain));

    std::vector<double> u = init_u;
    double lt = target.log_density(u);
    if (!std::isfinite(lt))
        throw std::runtime_error("run_mcmc: non-finite log-target at initial point (chain " +
                                 std::to_string(chain) + ")");

    double log_scale = std::log(1.0 / std::sqrt(static_cast<double>(d)));
    std::vector<double> jump_sd(d, 1.0);

    // Welford accumulators feeding the per-coordinate proposal scales.
    std::vector<double> run_mean(u), run_m2(d, 0.0);
    std::size_t run_n = 1;

    ChainResult out;
    out.constrained.reserve((cfg.iterations - cfg.burn_in) / cfg.thin + 1);
    std::vector<double> prop(d);
    std::size_t accepted_post = 0, post_total = 0;

    for (int iter = 0; iter < cfg.iterations; ++iter) {
        const double scale = std::exp(log_scale);
        for (std::size_t j = 0; j < d; ++j) prop[j] = u[j] + scale * jump_sd[j] * rng.normal();
        const double lt_prop = target.log_density(prop);
        const double log_ratio = lt_prop - lt;
        const double alpha = std::isfinite(lt_prop) ? std::min(1.0, std::exp(log_ratio)) : 0.0;
        bool accepted = false;
        if (alpha > 0.0 && std::log(rng.uniform_pos()) < log_ratio) {
            u = prop;
            lt = lt_prop;
            accepted = true;
        }

        if (iter < cfg.burn_in) {
            const double gamma = std::pow(static_cast<double>(iter + 1), -0.6);
            log_scale += gamma * (alpha - cfg.target_accept);
            log_scale = std::clamp(log_scale, -20.0, 10.0);
            ++run_n;
            for (std::size_t j = 0; j < d; ++j) {
                const double delta = u[j] - run_mean[j];
                run_mean[j] += delta / static_cast<double>(run_n);
                run_m2[j] += delta * (u[j] - run_mean[j]);
            }
            if ((iter + 1) % cfg.adapt_window == 0 && run_n > 10) {
                for (std::size_t j = 0; j < d; ++j) {
                    const double v = run_m2[j] / static_cast<double>(run_n - 1);
                    jump_sd[j] = std::clamp(std::sqrt(std::max(v, 1e-12)), 1e-6, 1e6);
                }
            }
        } else {
            ++post_total;
            if (accepted) ++accepted_post;
            const int post_index = iter - cfg.burn_in;
            if (post_index % cfg.thin == 0) {
                out.constrained.push_back(target.to_constrained(u));
                out.log_target.push_back(lt);
                out.iteration.push_back(iter);
            }
        }
    }
    out.accept_rate =
        post_total ? static_cast<double>(accepted_post) / static_cast<double>(post_total) : 0.0;
    return out;
}

/// Minimize the loss part alone from the target's heuristic start; callers
/// fall back to a prior draw when the result is unusable.
std::vector<double> minimize_loss(const LogTarget& target, bool* ok) {
    *ok = false;
    try {
        const auto res = optim::nelder_mead(
            [&](std::span<const double> u) {
                const double v = target.loss_only(u);
                return std::isfinite(v) ? v : 1e300;
            },
            target.heuristic_start());
        if (!std::isfinite(res.value)) return {};
        if (!std::isfinite(target.log_density(res.x))) return {};
        const double ref_loss = target.loss_only(target.reference_point());
        if (std::isfinite(ref_loss) && res.value > ref_loss + 1e-9) return {};
        *ok = true;
        return res.x;
    } catch (const std::exception&) {
        return {};
    }
}

}  // namespace

PosteriorDraws run_mcmc(const LogTarget& target, const SamplerConfig& cfg) {
    cfg.validate();
    const int n_chains = cfg.chains;

    bool fallback_warning = false;
    std::vector<double> minimizer;
    if (cfg.init == SamplerConfig::Init::LossMinimizer) {
        bool ok = false;
        minimizer = minimize_loss(target, &ok);
        if (!ok) fallback_warning = true;
    }

    std::vector<std::vector<double>> inits(n_chains);
    for (int c = 0; c < n_chains; ++c) {
        Rng init_rng(cfg.seed + static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ull);
        switch (cfg.init) {
            case SamplerConfig::Init::PriorDraw:
                inits[c] = target.prior_draw(init_rng);
                break;
            case SamplerConfig::Init::UserPoint:
                inits[c] = target.from_constrained(cfg.init_point);
                break;
            case SamplerConfig::Init::LossMinimizer: {
                if (fallback_warning) {
                    inits[c] = target.prior_draw(init_rng);
                } else {
                    inits[c] = minimizer;
                    // mild chain-specific dispersion around the optimum
                    for (auto& v : inits[c]) v += 0.01 * (1.0 + std::abs(v)) * init_rng.normal();
                    if (!std::isfinite(target.log_density(inits[c]))) inits[c] = minimizer;
                }
                break;
            }
        }
    }

    std::vector<ChainResult> results(n_chains);
    std::exception_ptr first_error;
    std::mutex error_mu;
    const int workers = std::max(1, std::min(cfg.threads, n_chains));
    if (workers == 1) {
        for (int c = 0; c < n_chains; ++c) results[c] = run_chain(target, cfg, c, inits[c]);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const int c = next.fetch_add(1);
                    if (c >= n_chains) return;
                    try {
                        results[c] = run_chain(target, cfg, c, inits[c]);
                    } catch (...) {
                        std::lock_guard lk(error_mu);
                        if (!first_error) first_error = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    const std::vector<std::string> names = target.names();
    const std::size_t d_out = names.size();
    std::size_t total = 0;
    for (const auto& r : results) total += r.constrained.size();

    PosteriorDraws out;
    out.names = names;
    out.draws = Matrix(total, d_out);
    out.chain_id.reserve(total);
    out.iteration.reserve(total);
    out.log_target.reserve(total);
    out.init_fallback_warning = fallback_warning;
    std::size_t row = 0;
    for (int c = 0; c < n_chains; ++c) {
        for (std::size_t i = 0; i < results[c].constrained.size(); ++i, ++row) {
            const auto& v = results[c].constrained[i];
            for (std::size_t j = 0; j < d_out; ++j) out.draws(row, j) = v[j];
            out.chain_id.push_back(c);
            out.iteration.push_back(results[c].iteration[i]);
            out.log_target.push_back(results[c].log_target[i]);
        }
        out.accept_rate.push_back(results[c].accept_rate);
    }

    if (n_chains >= 2) {
        const Diagnostics diag = diagnostics(out);
        out.rhat_warning = diag.rhat_warning;
    }
    return out;
}

namespace {

std::vector<std::vector<double>> split_in_half(const std::vector<std::vector<double>>& chains) {
    std::size_t min_len = std::numeric_limits<std::size_t>::max();
    for (const auto& c : chains) min_len = std::min(min_len, c.size());
    const std::size_t half = min_len / 2;
    std::vector<std::vector<double>> out;
    for (const auto& c : chains) {
        out.emplace_back(c.begin(), c.begin() + half);
        out.emplace_back(c.begin() + half, c.begin() + 2 * half);
    }
    return out;
}

struct ChainMoments {
    double w_unbiased = 0.0;
    double var_plus = 0.0;
    bool degenerate = true;
};

ChainMoments chain_moments(const std::vector<std::vector<double>>& seqs) {
    ChainMoments out;
    const std::size_t m = seqs.size();
    const std::size_t n = seqs.front().size();
    if (n < 4) return out;
    std::vector<double> means(m);
    double w = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double mean =
            std::accumulate(seqs[j].begin(), seqs[j].end(), 0.0) / static_cast<double>(n);
        means[j] = mean;
        double s2 = 0.0;
        for (double v : seqs[j]) s2 += (v - mean) * (v - mean);
        w += s2 / static_cast<double>(n - 1);
    }
    w /= static_cast<double>(m);
    const double grand =
        std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(m);
    double b = 0.0;
    for (double mj : means) b += (mj - grand) * (mj - grand);
    b *= static_cast<double>(n) / static_cast<double>(std::max<std::size_t>(m - 1, 1));
    out.w_unbiased = w;
    out.var_plus = (static_cast<double>(n - 1) / static_cast<double>(n)) * w +
                   b / static_cast<double>(n);
    out.degenerate = !(w > 0.0) || !std::isfinite(w);
    return out;
}

}  // namespace

double split_rhat(const std::vector<std::vector<double>>& chains, bool* defined) {
    const auto seqs = split_in_half(chains);
    if (seqs.size() < 2 || seqs.front().size() < 4) {
        if (defined) *defined = false;
        return std::numeric_limits<double>::quiet_NaN();
    }
    const ChainMoments mom = chain_moments(seqs);
    if (mom.degenerate) {
        if (defined) *defined = false;
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (defined) *defined = true;
    return std::sqrt(mom.var_plus / mom.w_unbiased);
}

double effective_sample_size(const std::vector<std::vector<double>>& chains, bool* defined) {
    const auto seqs = split_in_half(chains);
    if (seqs.empty() || seqs.front().size() < 4) {
        if (defined) *defined = false;
        return 0.0;
    }
    const ChainMoments mom = chain_moments(seqs);
    if (mom.degenerate || !(mom.var_plus > 0.0)) {
        if (defined) *defined = false;
        return 0.0;
    }
    const std::size_t m = seqs.size();
    const std::size_t n = seqs.front().size();
    const std::size_t max_lag = std::min<std::size_t>(n - 1, 2000);

    std::vector<double> means(m);
    for (std::size_t j = 0; j < m; ++j)
        means[j] = std::accumulate(seqs[j].begin(), seqs[j].end(), 0.0) / static_cast<double>(n);
    const auto mean_acov = [&](std::size_t lag) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i + lag < n; ++i)
                s += (seqs[j][i] - means[j]) * (seqs[j][i + lag] - means[j]);
            acc += s / static_cast<double>(n);
        }
        return acc / static_cast<double>(m);
    };

    const auto rho = [&](std::size_t lag) {
        return 1.0 - (mom.w_unbiased - mean_acov(lag)) / mom.var_plus;
    };

    // Geyer initial positive, monotone nonincreasing pair sums.
    double sum_rho = 0.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (std::size_t lag = 1; lag + 1 <= max_lag; lag += 2) {
        double pair = rho(lag) + rho(lag + 1);
        if (pair < 0.0) break;
        pair = std::min(pair, prev_pair);
        prev_pair = pair;
        sum_rho += pair;
    }
    double tau = 1.0 + 2.0 * sum_rho;
    if (!(tau > 0.0)) tau = 1.0;
    if (defined) *defined = true;
    const double total = static_cast<double>(m) * static_cast<double>(n);
    return std::min(total, total / tau);
}

Diagnostics diagnostics(const PosteriorDraws& draws) {
    Diagnostics out;
    const int m = draws.n_chains();
    for (std::size_t j = 0; j < draws.dim(); ++j) {
        ParamDiagnostics pd;
        pd.name = draws.names[j];
        pd.mean = draws.mean(j);
        pd.sd = draws.sd(j);
        std::vector<std::vector<double>> chains(std::max(m, 1));
        for (std::size_t i = 0; i < draws.size(); ++i)
            chains[static_cast<std::size_t>(draws.chain_id[i])].push_back(draws.draws(i, j));
        if (m >= 2) {
            pd.split_rhat = split_rhat(chains, &pd.rhat_defined);
            if (pd.rhat_defined && pd.split_rhat > 1.05) out.rhat_warning = true;
        }
        pd.ess = effective_sample_size(chains, &pd.ess_defined);
        pd.mcse = (pd.ess_defined && pd.ess > 0.0) ? pd.sd / std::sqrt(pd.ess)
                                                   : std::numeric_limits<double>::quiet_NaN();
        out.params.push_back(std::move(pd));
    }
    return out;
}

std::string Diagnostics::serialize() const {
    TextTable table;
    table.header = {"parameter", "mean", "sd", "split_rhat", "ess", "mcse"};
    for (const auto& p : params) {
        table.add_row({p.name, format_double(p.mean), format_double(p.sd),
                       p.rhat_defined ? format_double(p.split_rhat) : "undefined",
                       p.ess_defined ? format_double(p.ess) : "undefined",
                       format_double(p.mcse)});
    }
    return table.serialize();
}

}  // namespace gbstab
