#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace gbstab {

/// Seeded RNG with hand-rolled variate transforms. The standard library's
/// distribution objects are implementation-defined, so sampling goes through
/// explicit transforms to keep draws reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1), safe for log().
    double uniform_pos() {
        double u;
        do { u = uniform(); } while (u <= 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Gamma(shape, scale) via Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape, double scale) {
        if (shape < 1.0) {
            const double u = uniform_pos();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_pos();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

    /// Inverse-gamma(shape, scale): 1/X with X ~ Gamma(shape, 1/scale).
    double inv_gamma(double shape, double scale) { return 1.0 / gamma(shape, 1.0 / scale); }

    double chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

    /// Standard Student-t with nu degrees of freedom.
    double student_t(double nu) { return normal() / std::sqrt(chi_squared(nu) / nu); }

    /// Index draw from normalized weights.
    std::size_t categorical(std::span<const double> weights) {
        const double u = uniform();
        double cum = 0.0;
        for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
            cum += weights[k];
            if (u < cum) return k;
        }
        return weights.size() - 1;
    }

    std::vector<double> dirichlet(std::span<const double> alpha) {
        std::vector<double> g(alpha.size());
        double sum = 0.0;
        for (std::size_t k = 0; k < alpha.size(); ++k) {
            g[k] = gamma(alpha[k], 1.0);
            sum += g[k];
        }
        for (auto& v : g) v /= sum;
        return g;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace gbstab
