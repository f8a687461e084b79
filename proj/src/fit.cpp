#include "gbstab/fit.hpp"

#include "gbstab/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gbstab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double sample_mean(std::span<const double> y) {
    if (y.empty()) return 0.0;
    return std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
}

double sample_var(std::span<const double> y) {
    if (y.size() < 2) return 1.0;
    const double m = sample_mean(y);
    double s = 0.0;
    for (double v : y) s += (v - m) * (v - m);
    return s / static_cast<double>(y.size() - 1);
}

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }
double logit(double p) { return std::log(p) - std::log1p(-p); }

/// Stick-breaking simplex transform with log-Jacobian of
/// (v_1..v_{K-1}) -> (w_1..w_{K-1}).
std::vector<double> sticks_to_weights(std::span<const double> v, double* log_jac) {
    const std::size_t k = v.size() + 1;
    std::vector<double> w(k);
    double rem = 1.0, lj = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
        const double s = logistic(v[j]);
        w[j] = s * rem;
        lj += std::log(s) + std::log1p(-s) + std::log(rem);
        rem *= (1.0 - s);
    }
    w[k - 1] = rem;
    if (log_jac) *log_jac = lj;
    return w;
}

std::vector<double> weights_to_sticks(std::span<const double> w) {
    const std::size_t k = w.size();
    std::vector<double> v(k - 1);
    double rem = 1.0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
        const double s = std::clamp(w[j] / rem, 1e-12, 1.0 - 1e-12);
        v[j] = logit(s);
        rem *= (1.0 - s);
    }
    return v;
}

/// IG prior mean, or the mode when the mean does not exist.
double inv_gamma_centre(double shape, double scale) {
    return shape > 1.0 ? scale / (shape - 1.0) : scale / (shape + 1.0);
}

class LocationScaleTarget final : public LogTarget {
public:
    LocationScaleTarget(ContinuousModel model, NIGPrior prior, LossSpec loss,
                        std::vector<double> y, bool fix_sigma2)
        : template_(std::move(model)),
          prior_(prior),
          loss_(loss),
          y_(std::move(y)),
          fix_sigma2_(fix_sigma2) {
        loss_.validate();
    }

    std::size_t dim() const override { return fix_sigma2_ ? 1 : 2; }

    std::vector<std::string> names() const override {
        return fix_sigma2_ ? std::vector<std::string>{"mu"}
                           : std::vector<std::string>{"mu", "sigma2"};
    }

    double log_density(std::span<const double> u) const override {
        const double mu = u[0];
        const double sigma2 = fix_sigma2_ ? template_.sigma2() : std::exp(u[1]);
        if (!std::isfinite(sigma2) || sigma2 <= 0.0) return kNegInf;
        double lp = prior_log_density(prior_, mu, sigma2);
        if (!fix_sigma2_) lp += u[1];  // d sigma2 / d log sigma2
        if (lp == kNegInf) return kNegInf;
        const ContinuousModel m = template_.with_params(std::array{mu, sigma2});
        return lp - total_loss(m, y_, loss_);
    }

    double loss_only(std::span<const double> u) const override {
        const double sigma2 = fix_sigma2_ ? template_.sigma2() : std::exp(u[1]);
        if (!std::isfinite(sigma2) || sigma2 <= 0.0)
            return std::numeric_limits<double>::infinity();
        const ContinuousModel m = template_.with_params(std::array{u[0], sigma2});
        return total_loss(m, y_, loss_);
    }

    std::vector<double> to_constrained(std::span<const double> u) const override {
        if (fix_sigma2_) return {u[0]};
        return {u[0], std::exp(u[1])};
    }

    std::vector<double> from_constrained(std::span<const double> c) const override {
        if (c.size() != dim()) throw std::invalid_argument("init point: dimension mismatch");
        if (fix_sigma2_) return {c[0]};
        if (!(c[1] > 0.0)) throw std::invalid_argument("init point: sigma2 must be positive");
        return {c[0], std::log(c[1])};
    }

    std::vector<double> prior_draw(Rng& rng) const override {
        const double sigma2 =
            fix_sigma2_ ? template_.sigma2() : rng.inv_gamma(prior_.a0, prior_.b0);
        const double mu = rng.normal(prior_.mu0, std::sqrt(prior_.v0 * sigma2));
        if (fix_sigma2_) return {mu};
        return {mu, std::log(sigma2)};
    }

    std::vector<double> reference_point() const override {
        const double sigma2 =
            fix_sigma2_ ? template_.sigma2() : inv_gamma_centre(prior_.a0, prior_.b0);
        if (fix_sigma2_) return {prior_.mu0};
        return {prior_.mu0, std::log(sigma2)};
    }

    std::vector<double> heuristic_start() const override {
        if (y_.empty()) return reference_point();
        const double m = sample_mean(y_);
        if (fix_sigma2_) return {m};
        return {m, std::log(std::max(sample_var(y_), 1e-8))};
    }

private:
    ContinuousModel template_;
    NIGPrior prior_;
    LossSpec loss_;
    std::vector<double> y_;
    bool fix_sigma2_;
};

class RegressionTarget final : public LogTarget {
public:
    RegressionTarget(RegressionModel model, NIGPrior prior, LossSpec loss, std::vector<double> y)
        : template_(std::move(model)), prior_(prior), loss_(loss), y_(std::move(y)) {
        loss_.validate();
        if (y_.size() != template_.n())
            throw std::invalid_argument("regression fit: response length mismatch");
    }

    std::size_t dim() const override { return template_.p() + 1; }

    std::vector<std::string> names() const override {
        std::vector<std::string> n;
        for (std::size_t j = 0; j < template_.p(); ++j) n.push_back("coef." + std::to_string(j));
        n.push_back("sigma2");
        return n;
    }

    double log_density(std::span<const double> u) const override {
        const std::size_t p = template_.p();
        const double sigma2 = std::exp(u[p]);
        if (!std::isfinite(sigma2) || sigma2 <= 0.0) return kNegInf;
        double lp = inv_gamma_log_density(sigma2, prior_.a0, prior_.b0) + u[p];
        const double v = prior_.v0 * sigma2;
        for (std::size_t j = 0; j < p; ++j) {
            const double d = u[j] - prior_.mu0;
            lp += -0.5 * std::log(2.0 * M_PI * v) - d * d / (2.0 * v);
        }
        if (!std::isfinite(lp)) return kNegInf;
        return lp - loss_value(u, sigma2);
    }

    double loss_only(std::span<const double> u) const override {
        const double sigma2 = std::exp(u[template_.p()]);
        if (!std::isfinite(sigma2) || sigma2 <= 0.0)
            return std::numeric_limits<double>::infinity();
        return loss_value(u, sigma2);
    }

    std::vector<double> to_constrained(std::span<const double> u) const override {
        std::vector<double> c(u.begin(), u.end());
        c[template_.p()] = std::exp(u[template_.p()]);
        return c;
    }

    std::vector<double> from_constrained(std::span<const double> c) const override {
        if (c.size() != dim()) throw std::invalid_argument("init point: dimension mismatch");
        std::vector<double> u(c.begin(), c.end());
        if (!(c[template_.p()] > 0.0))
            throw std::invalid_argument("init point: sigma2 must be positive");
        u[template_.p()] = std::log(c[template_.p()]);
        return u;
    }

    std::vector<double> prior_draw(Rng& rng) const override {
        const double sigma2 = rng.inv_gamma(prior_.a0, prior_.b0);
        std::vector<double> u(dim());
        for (std::size_t j = 0; j < template_.p(); ++j)
            u[j] = rng.normal(prior_.mu0, std::sqrt(prior_.v0 * sigma2));
        u[template_.p()] = std::log(sigma2);
        return u;
    }

    std::vector<double> reference_point() const override {
        std::vector<double> u(dim(), prior_.mu0);
        u[template_.p()] = std::log(inv_gamma_centre(prior_.a0, prior_.b0));
        return u;
    }

    std::vector<double> heuristic_start() const override {
        // least squares via normal equations, ridge-stabilized
        const std::size_t p = template_.p();
        const Matrix& X = template_.design();
        Matrix xtx(p, p);
        std::vector<double> xty(p, 0.0);
        for (std::size_t i = 0; i < X.rows(); ++i) {
            const auto xi = X.row(i);
            for (std::size_t a = 0; a < p; ++a) {
                xty[a] += xi[a] * y_[i];
                for (std::size_t b = a; b < p; ++b) xtx(a, b) += xi[a] * xi[b];
            }
        }
        for (std::size_t a = 0; a < p; ++a) {
            xtx(a, a) += 1e-8;
            for (std::size_t b = 0; b < a; ++b) xtx(a, b) = xtx(b, a);
        }
        std::vector<double> coef = solve_spd(xtx, xty);
        double rss = 0.0;
        for (std::size_t i = 0; i < X.rows(); ++i) {
            const double r = y_[i] - dot(X.row(i), coef);
            rss += r * r;
        }
        const double s2 = std::max(rss / static_cast<double>(std::max<std::size_t>(
                                             X.rows() - p, 1)),
                                   1e-8);
        std::vector<double> u = std::move(coef);
        u.push_back(std::log(s2));
        return u;
    }

private:
    double loss_value(std::span<const double> u, double sigma2) const {
        std::vector<double> coef(u.begin(), u.begin() + template_.p());
        const RegressionModel m(template_.design(), template_.residual_family(), std::move(coef),
                                sigma2, template_.residual_model().sigma2_adj(),
                                template_.residual_model().nu());
        return total_loss(m, y_, loss_);
    }

    // Gaussian elimination with partial pivoting; p stays small here.
    static std::vector<double> solve_spd(Matrix a, std::vector<double> b) {
        const std::size_t p = b.size();
        for (std::size_t col = 0; col < p; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < p; ++r)
                if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
            if (piv != col) {
                for (std::size_t cc = 0; cc < p; ++cc) std::swap(a(col, cc), a(piv, cc));
                std::swap(b[col], b[piv]);
            }
            const double diag = a(col, col);
            if (std::abs(diag) < 1e-14) continue;
            for (std::size_t r = col + 1; r < p; ++r) {
                const double f = a(r, col) / diag;
                if (f == 0.0) continue;
                for (std::size_t cc = col; cc < p; ++cc) a(r, cc) -= f * a(col, cc);
                b[r] -= f * b[col];
            }
        }
        std::vector<double> x(p, 0.0);
        for (std::size_t ri = p; ri-- > 0;) {
            double s = b[ri];
            for (std::size_t cc = ri + 1; cc < p; ++cc) s -= a(ri, cc) * x[cc];
            x[ri] = std::abs(a(ri, ri)) < 1e-14 ? 0.0 : s / a(ri, ri);
        }
        return x;
    }

    RegressionModel template_;
    NIGPrior prior_;
    LossSpec loss_;
    std::vector<double> y_;
};

class MixtureTarget final : public LogTarget {
public:
    MixtureTarget(ContinuousModel model, MixturePrior prior, LossSpec loss, std::vector<double> y)
        : template_(std::move(model)), prior_(prior), loss_(loss), y_(std::move(y)) {
        loss_.validate();
        k_ = template_.n_components();
        if (k_ < 1) throw std::invalid_argument("mixture fit: needs at least one component");
    }

    std::size_t dim() const override { return 3 * k_ - 1; }

    std::vector<std::string> names() const override { return template_.param_names(); }

    double log_density(std::span<const double> u) const override {
        double stick_jac = 0.0;
        std::vector<double> w, means, scales;
        unpack(u, &w, &means, &scales, &stick_jac);
        double lp = prior_log_density(prior_, w, means, scales);
        if (lp == kNegInf) return kNegInf;
        lp += stick_jac;
        // sigma_k = floor + exp(u); the prior lives on sigma_k^2
        for (std::size_t i = 0; i < k_; ++i)
            lp += std::log(2.0 * scales[i] * (scales[i] - template_.scale_floor()));
        const ContinuousModel m = build(w, means, scales);
        const double loss_val = total_loss(m, y_, loss_);
        if (!std::isfinite(loss_val)) return kNegInf;
        return lp - loss_val;
    }

    double loss_only(std::span<const double> u) const override {
        std::vector<double> w, means, scales;
        unpack(u, &w, &means, &scales, nullptr);
        const double v = total_loss(build(w, means, scales), y_, loss_);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    }

    std::vector<double> to_constrained(std::span<const double> u) const override {
        std::vector<double> w, means, scales;
        unpack(u, &w, &means, &scales, nullptr);
        std::vector<double> c;
        c.reserve(3 * k_);
        c.insert(c.end(), w.begin(), w.end());
        c.insert(c.end(), means.begin(), means.end());
        c.insert(c.end(), scales.begin(), scales.end());
        return c;
    }

    std::vector<double> from_constrained(std::span<const double> c) const override {
        if (c.size() != 3 * k_) throw std::invalid_argument("init point: expected 3K parameters");
        std::vector<double> u;
        const std::vector<double> w(c.begin(), c.begin() + k_);
        const auto sticks = weights_to_sticks(w);
        u.insert(u.end(), sticks.begin(), sticks.end());
        for (std::size_t i = 0; i < k_; ++i) u.push_back(c[k_ + i]);
        for (std::size_t i = 0; i < k_; ++i) {
            const double s = c[2 * k_ + i];
            if (!(s > template_.scale_floor()))
                throw std::invalid_argument("init point: scale must exceed the floor");
            u.push_back(std::log(s - template_.scale_floor()));
        }
        return u;
    }

    std::vector<double> prior_draw(Rng& rng) const override {
        const std::vector<double> alpha(k_, prior_.alpha);
        const std::vector<double> w = rng.dirichlet(alpha);
        std::vector<double> c;
        c.insert(c.end(), w.begin(), w.end());
        std::vector<double> scales(k_);
        for (std::size_t i = 0; i < k_; ++i) {
            const double s2 = rng.inv_gamma(0.5 * prior_.nu0, 0.5 * prior_.S0);
            scales[i] = std::max(std::sqrt(s2), template_.scale_floor() * (1.0 + 1e-6));
        }
        for (std::size_t i = 0; i < k_; ++i)
            c.push_back(rng.normal(0.0, std::sqrt(prior_.kappa) * scales[i]));
        c.insert(c.end(), scales.begin(), scales.end());
        return from_constrained(c);
    }

    std::vector<double> reference_point() const override {
        std::vector<double> c;
        const double s2 = inv_gamma_centre(0.5 * prior_.nu0, 0.5 * prior_.S0);
        const double s = std::max(std::sqrt(s2), template_.scale_floor() * (1.0 + 1e-6));
        for (std::size_t i = 0; i < k_; ++i) c.push_back(1.0 / static_cast<double>(k_));
        for (std::size_t i = 0; i < k_; ++i)
            c.push_back(0.01 * static_cast<double>(i));  // break exact symmetry
        for (std::size_t i = 0; i < k_; ++i) c.push_back(s);
        return from_constrained(c);
    }

    std::vector<double> heuristic_start() const override {
        if (y_.size() < 2 * k_) return reference_point();
        std::vector<double> sorted(y_);
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> c(3 * k_);
        const double sd = std::sqrt(sample_var(y_));
        for (std::size_t i = 0; i < k_; ++i) {
            c[i] = 1.0 / static_cast<double>(k_);
            const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(k_);
            c[k_ + i] = sorted[static_cast<std::size_t>(q * (sorted.size() - 1))];
            c[2 * k_ + i] =
                std::max(sd / static_cast<double>(k_), template_.scale_floor() * 2.0);
        }
        return from_constrained(c);
    }

private:
    void unpack(std::span<const double> u, std::vector<double>* w, std::vector<double>* means,
                std::vector<double>* scales, double* stick_jac) const {
        *w = sticks_to_weights(u.subspan(0, k_ - 1), stick_jac);
        means->assign(u.begin() + (k_ - 1), u.begin() + (2 * k_ - 1));
        scales->resize(k_);
        for (std::size_t i = 0; i < k_; ++i)
            (*scales)[i] = template_.scale_floor() + std::exp(u[2 * k_ - 1 + i]);
    }

    ContinuousModel build(const std::vector<double>& w, const std::vector<double>& means,
                          const std::vector<double>& scales) const {
        return ContinuousModel::mixture(w, means, scales, template_.scale_floor());
    }

    ContinuousModel template_;
    MixturePrior prior_;
    LossSpec loss_;
    std::vector<double> y_;
    std::size_t k_ = 0;
};

class BinaryTarget final : public LogTarget {
public:
    BinaryTarget(BinaryModel model, GaussianCoefPrior prior, LossSpec loss, Matrix X,
                 std::vector<double> labels)
        : template_(std::move(model)),
          prior_(prior),
          loss_(loss),
          x_(std::move(X)),
          labels_(std::move(labels)) {
        loss_.validate();
        if (labels_.size() != x_.rows())
            throw std::invalid_argument("binary fit: label length mismatch");
        if (template_.coef().size() != x_.cols())
            throw std::invalid_argument("binary fit: coefficient dimension mismatch");
    }

    std::size_t dim() const override { return template_.coef().size(); }

    std::vector<std::string> names() const override {
        std::vector<std::string> n;
        for (std::size_t j = 0; j < dim(); ++j) n.push_back("coef." + std::to_string(j));
        return n;
    }

    double log_density(std::span<const double> u) const override {
        const double lp = prior_log_density(prior_, u);
        const BinaryModel m = template_.with_coef(std::vector<double>(u.begin(), u.end()));
        const double loss_val = total_loss(m, x_, labels_, loss_);
        if (!std::isfinite(loss_val)) return kNegInf;
        return lp - loss_val;
    }

    double loss_only(std::span<const double> u) const override {
        const BinaryModel m = template_.with_coef(std::vector<double>(u.begin(), u.end()));
        const double v = total_loss(m, x_, labels_, loss_);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    }

    std::vector<double> to_constrained(std::span<const double> u) const override {
        return {u.begin(), u.end()};
    }

    std::vector<double> from_constrained(std::span<const double> c) const override {
        if (c.size() != dim()) throw std::invalid_argument("init point: dimension mismatch");
        return {c.begin(), c.end()};
    }

    std::vector<double> prior_draw(Rng& rng) const override {
        std::vector<double> u(dim());
        for (auto& v : u) v = rng.normal(prior_.mean, prior_.sd);
        return u;
    }

    std::vector<double> reference_point() const override {
        return std::vector<double>(dim(), prior_.mean);
    }

private:
    BinaryModel template_;
    GaussianCoefPrior prior_;
    LossSpec loss_;
    Matrix x_;
    std::vector<double> labels_;
};

}  // namespace

std::unique_ptr<LogTarget> make_target(const FitProblem& problem, const FitData& data) {
    if (const auto* cm = std::get_if<ContinuousModel>(&problem.model)) {
        if (cm->family() == ContinuousFamily::GaussianMixture) {
            const auto* prior = std::get_if<MixturePrior>(&problem.prior);
            if (!prior) throw std::invalid_argument("mixture fit requires a MixturePrior");
            return std::make_unique<MixtureTarget>(*cm, *prior, problem.loss, data.y);
        }
        const auto* prior = std::get_if<NIGPrior>(&problem.prior);
        if (!prior) throw std::invalid_argument("location-scale fit requires an NIGPrior");
        return std::make_unique<LocationScaleTarget>(*cm, *prior, problem.loss, data.y,
                                                     problem.fix_sigma2);
    }
    if (const auto* rm = std::get_if<RegressionModel>(&problem.model)) {
        const auto* prior = std::get_if<NIGPrior>(&problem.prior);
        if (!prior) throw std::invalid_argument("regression fit requires an NIGPrior");
        return std::make_unique<RegressionTarget>(*rm, *prior, problem.loss, data.y);
    }
    const auto& bm = std::get<BinaryModel>(problem.model);
    const auto* prior = std::get_if<GaussianCoefPrior>(&problem.prior);
    if (!prior) throw std::invalid_argument("binary fit requires a GaussianCoefPrior");
    if (!data.X) throw std::invalid_argument("binary fit requires a design matrix");
    return std::make_unique<BinaryTarget>(bm, *prior, problem.loss, *data.X, data.y);
}

PosteriorDraws run_mcmc(const FitProblem& problem, const FitData& data, const SamplerConfig& cfg) {
    const auto target = make_target(problem, data);
    return run_mcmc(*target, cfg);
}

std::vector<double> loss_minimizer_init(const FitProblem& problem, const FitData& data,
                                        bool* fallback, std::uint64_t fallback_seed) {
    const auto target = make_target(problem, data);
    bool ok = false;
    std::vector<double> u;
    try {
        const auto res = optim::nelder_mead(
            [&](std::span<const double> v) {
                const double val = target->loss_only(v);
                return std::isfinite(val) ? val : 1e300;
            },
            target->heuristic_start());
        const double ref_loss = target->loss_only(target->reference_point());
        if (std::isfinite(res.value) && std::isfinite(target->log_density(res.x)) &&
            (!std::isfinite(ref_loss) || res.value <= ref_loss + 1e-9)) {
            ok = true;
            u = res.x;
        }
    } catch (const std::exception&) {
        ok = false;
    }
    if (!ok) {
        Rng rng(fallback_seed);
        u = target->prior_draw(rng);
    }
    if (fallback) *fallback = !ok;
    return target->to_constrained(u);
}

}  // namespace gbstab
