#pragma once

// Shared helpers for the statistical test suites.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "muscle/cluster.hpp"
#include "muscle/rng.hpp"
#include "muscle/tail.hpp"

namespace muscle::testing {

inline std::vector<long long> multinomial(Rng& rng, long long k, std::span<const double> probs) {
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    std::vector<long long> counts(probs.size(), 0);
    for (long long draw = 0; draw < k; ++draw) {
        const double u = rng.uniform() * acc;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        ++counts[static_cast<std::size_t>(it - cdf.begin())];
    }
    return counts;
}

// Exact Poisson sampler: large means are split into batches small enough for
// Knuth's product method to stay inside double range.
inline long long poisson(Rng& rng, double mean) {
    long long total = 0;
    while (mean > 0.0) {
        const double lambda = std::min(mean, 16.0);
        mean -= lambda;
        const double limit = std::exp(-lambda);
        double prod = rng.uniform();
        while (prod > limit) {
            ++total;
            prod *= rng.uniform();
        }
    }
    return total;
}

inline ClusterCounts counts_from_values(std::span<const long long> values) {
    ClusterCounts cc;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] <= 0) continue;  // zero-count clusters are never stored
        cc.counts[Cluster::singleton(static_cast<int>(i))] = values[i];
        cc.level += values[i];
    }
    cc.requested_level = cc.level;
    return cc;
}

// The grouped chi-square statistic: individual terms for the first s1
// categories plus one pooled term for categories s1+1..s2, all against the
// true probabilities.
inline double grouped_statistic(std::span<const long long> counts, std::span<const double> probs,
                                long long k, int s1, int s2) {
    const double kd = static_cast<double>(k);
    double stat = 0.0;
    for (int j = 0; j < s1; ++j) {
        const double dev = static_cast<double>(counts[static_cast<std::size_t>(j)]) / kd -
                           probs[static_cast<std::size_t>(j)];
        stat += kd * dev * dev / probs[static_cast<std::size_t>(j)];
    }
    double dev = 0.0, mass = 0.0;
    for (int j = s1; j < s2; ++j) {
        dev += static_cast<double>(counts[static_cast<std::size_t>(j)]) / kd -
               probs[static_cast<std::size_t>(j)];
        mass += probs[static_cast<std::size_t>(j)];
    }
    stat += kd * dev * dev / mass;
    return stat;
}

// Kolmogorov-Smirnov distance between a sample and a CDF.
template <typename Cdf>
inline double ks_distance(std::vector<double> values, Cdf cdf) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        worst = std::max(worst, std::abs(f - static_cast<double>(i) / n));
        worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return worst;
}

inline double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("kendall_tau: bad input");
    long long concordant = 0, discordant = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double s = (x[i] - x[j]) * (y[i] - y[j]);
            if (s > 0)
                ++concordant;
            else if (s < 0)
                ++discordant;
        }
    }
    const double pairs = 0.5 * static_cast<double>(x.size()) * static_cast<double>(x.size() - 1);
    return static_cast<double>(concordant - discordant) / pairs;
}

}  // namespace muscle::testing
