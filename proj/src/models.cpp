#include "gbstab/models.hpp"

#include "gbstab/special.hpp"
#include "gbstab/tlogistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gbstab {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
constexpr double kLogDensityFloor = -700.0;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double student_t_log_norm(double nu) {
    return special::log_gamma(0.5 * (nu + 1.0)) - special::log_gamma(0.5 * nu) -
           0.5 * std::log(nu * M_PI);
}

}  // namespace

ContinuousModel ContinuousModel::gaussian(double mu, double sigma2, double sigma2_adj) {
    require(std::isfinite(mu), "gaussian: non-finite mu");
    require(std::isfinite(sigma2) && sigma2 > 0.0, "gaussian: sigma2 must be positive");
    require(std::isfinite(sigma2_adj) && sigma2_adj > 0.0, "gaussian: sigma2_adj must be positive");
    ContinuousModel m;
    m.family_ = ContinuousFamily::Gaussian;
    m.mu_ = mu;
    m.sigma2_ = sigma2;
    m.sigma2_adj_ = sigma2_adj;
    m.refresh_constants();
    return m;
}

ContinuousModel ContinuousModel::student_t(double mu, double sigma2, double nu) {
    require(std::isfinite(mu), "student_t: non-finite mu");
    require(std::isfinite(sigma2) && sigma2 > 0.0, "student_t: sigma2 must be positive");
    require(std::isfinite(nu) && nu > 0.0, "student_t: nu must be positive");
    ContinuousModel m;
    m.family_ = ContinuousFamily::StudentT;
    m.mu_ = mu;
    m.sigma2_ = sigma2;
    m.nu_ = nu;
    m.refresh_constants();
    return m;
}

ContinuousModel ContinuousModel::mixture(std::vector<double> weights, std::vector<double> means,
                                         std::vector<double> scales, double scale_floor) {
    const std::size_t k = weights.size();
    require(k >= 1, "mixture: at least one component");
    require(means.size() == k && scales.size() == k, "mixture: component count mismatch");
    require(scale_floor > 0.0, "mixture: scale_floor must be positive");
    double wsum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        require(std::isfinite(weights[i]) && weights[i] >= 0.0, "mixture: weights must be nonnegative");
        require(std::isfinite(means[i]), "mixture: non-finite mean");
        require(std::isfinite(scales[i]) && scales[i] >= scale_floor,
                "mixture: scales must be >= scale_floor");
        wsum += weights[i];
    }
    require(std::abs(wsum - 1.0) <= 1e-12, "mixture: weights must sum to 1 within 1e-12");
    ContinuousModel m;
    m.family_ = ContinuousFamily::GaussianMixture;
    m.weights_ = std::move(weights);
    m.means_ = std::move(means);
    m.scales_ = std::move(scales);
    m.scale_floor_ = scale_floor;
    m.refresh_constants();
    return m;
}

void ContinuousModel::refresh_constants() {
    switch (family_) {
        case ContinuousFamily::Gaussian:
            log_norm_ = -0.5 * (kLogTwoPi + std::log(sigma2_ * sigma2_adj_));
            break;
        case ContinuousFamily::StudentT:
            log_norm_ = student_t_log_norm(nu_) - 0.5 * std::log(sigma2_);
            break;
        case ContinuousFamily::GaussianMixture:
            comp_log_norm_.resize(weights_.size());
            for (std::size_t i = 0; i < weights_.size(); ++i) {
                comp_log_norm_[i] = (weights_[i] > 0.0
                                         ? std::log(weights_[i])
                                         : -std::numeric_limits<double>::infinity()) -
                                    std::log(scales_[i]) - 0.5 * kLogTwoPi;
            }
            break;
    }
}

double ContinuousModel::log_density(double y) const {
    if (!std::isfinite(y)) throw std::invalid_argument("log_density: non-finite observation");
    switch (family_) {
        case ContinuousFamily::Gaussian: {
            const double v = sigma2_ * sigma2_adj_;
            const double d = y - mu_;
            return log_norm_ - 0.5 * d * d / v;
        }
        case ContinuousFamily::StudentT: {
            const double z2 = (y - mu_) * (y - mu_) / (nu_ * sigma2_);
            return log_norm_ - 0.5 * (nu_ + 1.0) * std::log1p(z2);
        }
        case ContinuousFamily::GaussianMixture: {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < weights_.size(); ++i) {
                const double z = (y - means_[i]) / scales_[i];
                const double lp = comp_log_norm_[i] - 0.5 * z * z;
                if (lp > best) best = lp;
            }
            if (!std::isfinite(best)) return best;
            double sum = 0.0;
            for (std::size_t i = 0; i < weights_.size(); ++i) {
                const double z = (y - means_[i]) / scales_[i];
                sum += std::exp(comp_log_norm_[i] - 0.5 * z * z - best);
            }
            return best + std::log(sum);
        }
    }
    return -std::numeric_limits<double>::infinity();
}

double ContinuousModel::density(double y) const {
    const double lp = log_density(y);
    return lp < kLogDensityFloor ? 0.0 : std::exp(lp);
}

double ContinuousModel::cdf(double y) const {
    switch (family_) {
        case ContinuousFamily::Gaussian:
            return special::normal_cdf((y - mu_) / std::sqrt(sigma2_ * sigma2_adj_));
        case ContinuousFamily::StudentT:
            return special::student_t_cdf((y - mu_) / std::sqrt(sigma2_), nu_);
        case ContinuousFamily::GaussianMixture: {
            double c = 0.0;
            for (std::size_t i = 0; i < weights_.size(); ++i)
                c += weights_[i] * special::normal_cdf((y - means_[i]) / scales_[i]);
            return c;
        }
    }
    return 0.0;
}

double ContinuousModel::sample_one(Rng& rng) const {
    switch (family_) {
        case ContinuousFamily::Gaussian:
            return rng.normal(mu_, std::sqrt(sigma2_ * sigma2_adj_));
        case ContinuousFamily::StudentT:
            return mu_ + std::sqrt(sigma2_) * rng.student_t(nu_);
        case ContinuousFamily::GaussianMixture: {
            const std::size_t k = rng.categorical(weights_);
            return rng.normal(means_[k], scales_[k]);
        }
    }
    return 0.0;
}

std::vector<double> ContinuousModel::sample(std::size_t n, Rng& rng) const {
    std::vector<double> out(n);
    for (auto& v : out) v = sample_one(rng);
    return out;
}

std::pair<double, double> ContinuousModel::core_interval() const {
    switch (family_) {
        case ContinuousFamily::Gaussian: {
            const double sd = std::sqrt(sigma2_ * sigma2_adj_);
            return {mu_ - 12.0 * sd, mu_ + 12.0 * sd};
        }
        case ContinuousFamily::StudentT: {
            const double sd = std::sqrt(sigma2_);
            return {mu_ - 50.0 * sd, mu_ + 50.0 * sd};
        }
        case ContinuousFamily::GaussianMixture: {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (std::size_t i = 0; i < weights_.size(); ++i) {
                lo = std::min(lo, means_[i] - 12.0 * scales_[i]);
                hi = std::max(hi, means_[i] + 12.0 * scales_[i]);
            }
            return {lo, hi};
        }
    }
    return {-1.0, 1.0};
}

double ContinuousModel::density_sup_bound() const {
    switch (family_) {
        case ContinuousFamily::Gaussian:
            return 1.0 / std::sqrt(2.0 * M_PI * sigma2_ * sigma2_adj_);
        case ContinuousFamily::StudentT:
            return std::exp(log_norm_);
        case ContinuousFamily::GaussianMixture: {
            double b = 0.0;
            for (std::size_t i = 0; i < weights_.size(); ++i)
                b += weights_[i] / (std::sqrt(2.0 * M_PI) * scales_[i]);
            return b;
        }
    }
    return 0.0;
}

double ContinuousModel::mean() const {
    if (family_ == ContinuousFamily::GaussianMixture)
        return std::inner_product(weights_.begin(), weights_.end(), means_.begin(), 0.0);
    return mu_;
}

double ContinuousModel::mu() const {
    require(family_ != ContinuousFamily::GaussianMixture, "mu: not a location-scale family");
    return mu_;
}

double ContinuousModel::sigma2() const {
    require(family_ != ContinuousFamily::GaussianMixture, "sigma2: not a location-scale family");
    return sigma2_;
}

double ContinuousModel::variance_param() const {
    require(family_ != ContinuousFamily::GaussianMixture,
            "variance_param: not a location-scale family");
    return family_ == ContinuousFamily::Gaussian ? sigma2_ * sigma2_adj_ : sigma2_;
}

std::vector<double> ContinuousModel::params() const {
    if (family_ == ContinuousFamily::GaussianMixture) {
        std::vector<double> p;
        p.reserve(3 * weights_.size());
        p.insert(p.end(), weights_.begin(), weights_.end());
        p.insert(p.end(), means_.begin(), means_.end());
        p.insert(p.end(), scales_.begin(), scales_.end());
        return p;
    }
    return {mu_, sigma2_};
}

std::vector<std::string> ContinuousModel::param_names() const {
    if (family_ == ContinuousFamily::GaussianMixture) {
        std::vector<std::string> names;
        const std::size_t k = weights_.size();
        for (std::size_t i = 1; i <= k; ++i) names.push_back("weight." + std::to_string(i));
        for (std::size_t i = 1; i <= k; ++i) names.push_back("mean." + std::to_string(i));
        for (std::size_t i = 1; i <= k; ++i) names.push_back("scale." + std::to_string(i));
        return names;
    }
    return {"mu", "sigma2"};
}

ContinuousModel ContinuousModel::with_params(std::span<const double> params) const {
    switch (family_) {
        case ContinuousFamily::Gaussian:
            require(params.size() == 2, "with_params: expected (mu, sigma2)");
            return gaussian(params[0], params[1], sigma2_adj_);
        case ContinuousFamily::StudentT:
            require(params.size() == 2, "with_params: expected (mu, sigma2)");
            return student_t(params[0], params[1], nu_);
        case ContinuousFamily::GaussianMixture: {
            const std::size_t k = weights_.size();
            require(params.size() == 3 * k, "with_params: expected 3K mixture parameters");
            std::vector<double> w(params.begin(), params.begin() + k);
            std::vector<double> m(params.begin() + k, params.begin() + 2 * k);
            std::vector<double> s(params.begin() + 2 * k, params.end());
            return mixture(std::move(w), std::move(m), std::move(s), scale_floor_);
        }
    }
    throw std::logic_error("with_params: unknown family");
}

std::vector<double> sample(const ContinuousModel& model, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    Rng rng(seed);
    return model.sample(n, rng);
}

RegressionModel::RegressionModel(Matrix design, ContinuousFamily residual_family,
                                 std::vector<double> coef, double sigma2, double sigma2_adj,
                                 double nu)
    : design_(std::move(design)),
      coef_(std::move(coef)),
      residual_(residual_family == ContinuousFamily::Gaussian
                    ? ContinuousModel::gaussian(0.0, sigma2, sigma2_adj)
                    : ContinuousModel::student_t(0.0, sigma2, nu)) {
    require(residual_family != ContinuousFamily::GaussianMixture,
            "regression: residual family must be Gaussian or StudentT");
    require(design_.cols() >= 1, "regression: p must be >= 1");
    require(design_.rows() >= design_.cols(), "regression: need n >= p");
    require(coef_.size() == design_.cols(), "regression: coefficient dimension mismatch");
}

std::vector<double> RegressionModel::sample(Rng& rng) const {
    std::vector<double> y(n());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = fitted(i) + residual_.sample_one(rng);
    return y;
}

BinaryModel BinaryModel::logistic(std::vector<double> coef) {
    require(!coef.empty(), "binary model: empty coefficient vector");
    BinaryModel m;
    m.family_ = BinaryFamily::Logistic;
    m.coef_ = std::move(coef);
    return m;
}

BinaryModel BinaryModel::probit(std::vector<double> coef, double w_link) {
    require(!coef.empty(), "binary model: empty coefficient vector");
    require(w_link >= 0.0, "binary model: w_link must be nonnegative");
    BinaryModel m;
    m.family_ = BinaryFamily::Probit;
    m.coef_ = std::move(coef);
    m.w_link_ = w_link;
    return m;
}

BinaryModel BinaryModel::t_logistic(std::vector<double> coef, double t, double w_link) {
    require(!coef.empty(), "binary model: empty coefficient vector");
    require(t > 0.0 && t < 2.0, "binary model: t must lie in (0,2)");
    require(w_link >= 0.0, "binary model: w_link must be nonnegative");
    BinaryModel m;
    m.family_ = BinaryFamily::TLogistic;
    m.coef_ = std::move(coef);
    m.t_ = t;
    m.w_link_ = w_link;
    return m;
}

BinaryModel BinaryModel::mislabelled(std::vector<double> coef, double nu0, double nu1) {
    require(!coef.empty(), "binary model: empty coefficient vector");
    require(nu0 >= 0.0 && nu0 < 1.0 && nu1 >= 0.0 && nu1 < 1.0,
            "binary model: mislabelling rates must lie in [0,1)");
    BinaryModel m;
    m.family_ = BinaryFamily::Mislabelled;
    m.coef_ = std::move(coef);
    m.nu0_ = nu0;
    m.nu1_ = nu1;
    return m;
}

double BinaryModel::prob_one_score(double score) const {
    switch (family_) {
        case BinaryFamily::Logistic:
            return 1.0 / (1.0 + std::exp(-score));
        case BinaryFamily::Probit:
            return special::normal_cdf(w_link_ * score);
        case BinaryFamily::TLogistic: {
            const double s = w_link_ * score;
            return t_exp(0.5 * s - t_log_partition(s, t_), t_);
        }
        case BinaryFamily::Mislabelled: {
            const double p = 1.0 / (1.0 + std::exp(-score));
            return (1.0 - nu1_) * p + nu0_ * (1.0 - p);
        }
    }
    return 0.5;
}

double BinaryModel::class_probability(std::span<const double> x, int label) const {
    if (x.size() != coef_.size())
        throw std::invalid_argument("class_probability: covariate dimension mismatch");
    if (label != 0 && label != 1)
        throw std::invalid_argument("class_probability: label must be 0 or 1");
    const double p1 = prob_one_score(dot(x, coef_));
    return label == 1 ? p1 : 1.0 - p1;
}

BinaryModel BinaryModel::with_coef(std::vector<double> coef) const {
    require(coef.size() == coef_.size(), "with_coef: dimension mismatch");
    BinaryModel m = *this;
    m.coef_ = std::move(coef);
    return m;
}

}  // namespace gbstab
