#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "muscle/rng.hpp"
#include "muscle/sample.hpp"

namespace muscle {

// The two experiment families. `rho` is the Gaussian-copula correlation;
// `alpha` the logistic dependence (max-mixture only, in (0,1)).
struct GeneratorSpec {
    enum class Kind { GaussianCopulaPareto, MaxMixture };
    Kind kind = Kind::GaussianCopulaPareto;
    int dim = 2;
    double rho = 0.0;
    double alpha = 0.5;
    std::uint64_t seed = 1;
};

// Stream identifiers: every sampler draws from Rng::stream(seed, chunk, id).
// Whole-sample generation uses chunk 0; the Monte-Carlo reference estimator
// uses chunks >= 1000, so the two layouts never share a stream.
namespace streams {
inline constexpr std::uint64_t common_factor = 1;
inline constexpr std::uint64_t idiosyncratic = 2;
inline constexpr std::uint64_t gauss_block_a = 3;
inline constexpr std::uint64_t gauss_idio_a = 4;
inline constexpr std::uint64_t gauss_block_b = 5;
inline constexpr std::uint64_t gauss_idio_b = 6;
inline constexpr std::uint64_t logistic_base = 16;  // + block index
inline constexpr std::uint64_t mc_chunk_base = 1000;
}  // namespace streams

namespace detail {

inline double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

// Upper tail of the standard normal; exact where 1 - Phi(z) would cancel.
inline double standard_normal_sf(double z) { return 0.5 * std::erfc(z * 0.7071067811865475244); }

// Positive alpha-stable variate with Laplace transform exp(-t^alpha), by the
// Chambers-Mallows-Stuck construction. Consumes two uniforms.
inline double positive_stable(double alpha, Rng& rng) {
    const double v = 3.14159265358979323846 * rng.uniform();
    const double w = rng.exponential();
    const double a = std::sin(alpha * v) / std::pow(std::sin(v), 1.0 / alpha);
    const double b = std::pow(std::sin((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
    return a * b;
}

}  // namespace detail

// Equicorrelated Gaussian values mapped to unit-Frechet margins via the
// one-factor representation sqrt(rho) W + sqrt(1-rho) E_j (no d x d Cholesky).
inline void gaussian_copula_frechet_row(std::span<const int> coords, double rho, Rng& common,
                                        Rng& idio, std::span<double> row) {
    const double w = common.normal();
    const double a = std::sqrt(rho);
    const double b = std::sqrt(1.0 - rho);
    for (int j : coords) {
        const double g = a * w + b * idio.normal();
        // -1/log(U) with log(U) = log1p(-sf): stable for U near 1.
        const double sf = detail::standard_normal_sf(g);
        row[static_cast<std::size_t>(j)] = -1.0 / std::log1p(-sf);
    }
}

// Symmetric-logistic max-stable values with unit-Frechet margins via the
// positive-stable mixture: X_i = (S / E_i)^alpha.
inline void logistic_frechet_row(std::span<const int> coords, double alpha, Rng& rng,
                                 std::span<double> row) {
    const double s = detail::positive_stable(alpha, rng);
    for (int j : coords) {
        row[static_cast<std::size_t>(j)] = std::pow(s / rng.exponential(), alpha);
    }
}

// Standalone logistic sample (used by the dependence checks).
inline Sample sample_logistic(int dim, double alpha, long long n, Rng& rng) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("sample_logistic: alpha must lie in (0,1)");
    Sample out = Sample::zeros(n, dim);
    std::vector<int> coords(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) coords[static_cast<std::size_t>(j)] = j;
    for (long long i = 0; i < n; ++i) {
        logistic_frechet_row(
            coords, alpha, rng,
            {out.values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(dim),
             static_cast<std::size_t>(dim)});
    }
    return out;
}

// Row-by-row sampler for a GeneratorSpec. Whole-sample generation and the
// chunked Monte-Carlo passes share this object, so a (seed, chunk) pair
// always reproduces the same row stream.
class RowGenerator {
public:
    RowGenerator(const GeneratorSpec& spec, std::uint64_t chunk) : spec_(spec) {
        validate(spec);
        if (spec.kind == GeneratorSpec::Kind::GaussianCopulaPareto) {
            rngs_.push_back(Rng::stream(spec.seed, chunk, streams::common_factor));
            rngs_.push_back(Rng::stream(spec.seed, chunk, streams::idiosyncratic));
        } else {
            rngs_.push_back(Rng::stream(spec.seed, chunk, streams::gauss_block_a));
            rngs_.push_back(Rng::stream(spec.seed, chunk, streams::gauss_idio_a));
            rngs_.push_back(Rng::stream(spec.seed, chunk, streams::gauss_block_b));
            rngs_.push_back(Rng::stream(spec.seed, chunk, streams::gauss_idio_b));
            for (int b = 0; b < 3; ++b)
                rngs_.push_back(Rng::stream(spec.seed, chunk, streams::logistic_base + static_cast<std::uint64_t>(b)));
        }
    }

    int dim() const { return spec_.dim; }

    void next(std::span<double> row) {
        if (spec_.kind == GeneratorSpec::Kind::GaussianCopulaPareto) {
            next_pareto(row);
        } else {
            next_mixture(row);
        }
    }

    static void validate(const GeneratorSpec& spec) {
        if (spec.dim < 2) throw std::invalid_argument("generator: dim must be >= 2");
        if (!(spec.rho >= 0.0 && spec.rho < 1.0))
            throw std::invalid_argument("generator: rho must lie in [0,1)");
        if (spec.kind == GeneratorSpec::Kind::MaxMixture) {
            if (spec.dim != 5) throw std::invalid_argument("gen_max_mixture: dim is fixed to 5");
            if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
                throw std::invalid_argument("gen_max_mixture: alpha must lie in (0,1)");
        }
    }

private:
    void next_pareto(std::span<double> row) {
        const double w = rngs_[0].normal();
        const double a = std::sqrt(spec_.rho);
        const double b = std::sqrt(1.0 - spec_.rho);
        for (int j = 0; j < spec_.dim; ++j) {
            const double g = a * w + b * rngs_[1].normal();
            // 1/(1-U) with 1-U computed directly as the normal survival.
            row[static_cast<std::size_t>(j)] = 1.0 / detail::standard_normal_sf(g);
        }
    }

    void next_mixture(std::span<double> row) {
        static constexpr int ga[] = {0, 1};
        static constexpr int gb[] = {3, 4};
        static constexpr int l0[] = {0, 1, 2};
        static constexpr int l1[] = {2, 3, 4};
        static constexpr int l2[] = {0, 1, 2, 3, 4};
        static constexpr double w_ga[] = {5.0 / 7.0, 5.0 / 7.0};
        static constexpr double w_gb[] = {5.0 / 7.0, 5.0 / 7.0};
        static constexpr double w_l0[] = {1.0 / 7.0, 1.0 / 7.0, 3.0 / 7.0};
        static constexpr double w_l1[] = {3.0 / 7.0, 1.0 / 7.0, 1.0 / 7.0};
        static constexpr double w_l2[] = {1.0 / 7.0, 1.0 / 7.0, 1.0 / 7.0, 1.0 / 7.0, 1.0 / 7.0};

        double buf[5];
        for (int j = 0; j < 5; ++j) row[static_cast<std::size_t>(j)] = 0.0;
        const auto fold_max = [&](std::span<const int> coords, std::span<const double> weights) {
            for (std::size_t t = 0; t < coords.size(); ++t) {
                const int j = coords[t];
                row[static_cast<std::size_t>(j)] =
                    std::max(row[static_cast<std::size_t>(j)], weights[t] * buf[j]);
            }
        };

        gaussian_copula_frechet_row(ga, spec_.rho, rngs_[0], rngs_[1], buf);
        fold_max(ga, w_ga);
        gaussian_copula_frechet_row(gb, spec_.rho, rngs_[2], rngs_[3], buf);
        fold_max(gb, w_gb);
        logistic_frechet_row(l0, spec_.alpha, rngs_[4], buf);
        fold_max(l0, w_l0);
        logistic_frechet_row(l1, spec_.alpha, rngs_[5], buf);
        fold_max(l1, w_l1);
        logistic_frechet_row(l2, spec_.alpha, rngs_[6], buf);
        fold_max(l2, w_l2);
    }

    GeneratorSpec spec_;
    std::vector<Rng> rngs_;
};

inline Sample generate(const GeneratorSpec& spec, long long n, std::uint64_t chunk = 0) {
    if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
    RowGenerator gen(spec, chunk);
    Sample out = Sample::zeros(n, spec.dim);
    for (long long i = 0; i < n; ++i) {
        gen.next({out.values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(spec.dim),
                  static_cast<std::size_t>(spec.dim)});
    }
    return out;
}

// Gaussian copula with equicorrelation rho and standard Pareto margins
// P(X_j > x) = 1/x.
inline Sample gen_gaussian_copula_pareto(const GeneratorSpec& spec, long long n) {
    if (spec.kind != GeneratorSpec::Kind::GaussianCopulaPareto)
        throw std::invalid_argument("gen_gaussian_copula_pareto: wrong generator kind");
    return generate(spec, n);
}

// Five-dimensional max-mixture of two Gaussian-copula blocks and three
// logistic blocks; coordinatewise weighted maxima with weights that keep each
// margin unit Frechet and give the seven construction groups equal mass.
inline Sample gen_max_mixture(const GeneratorSpec& spec, long long n) {
    if (spec.kind != GeneratorSpec::Kind::MaxMixture)
        throw std::invalid_argument("gen_max_mixture: wrong generator kind");
    return generate(spec, n);
}

}  // namespace muscle
