#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "muscle/cluster.hpp"
#include "muscle/projection.hpp"
#include "muscle/sample.hpp"

namespace muscle {

// Exceedance counts per cluster at a given level. `level` is the effective
// number of strict exceedances of the threshold; ties at the threshold make
// it fall below `requested_level`, and every downstream formula uses the
// effective value as k.
struct ClusterCounts {
    long long requested_level = 0;
    long long level = 0;
    double threshold = 0.0;
    long long sample_size = 0;
    std::unordered_map<Cluster, long long, ClusterHash> counts;

    long long distinct() const { return static_cast<long long>(counts.size()); }

    // Descending by count; ties broken by lexicographically smallest cluster.
    std::vector<std::pair<Cluster, long long>> sorted_desc() const {
        std::vector<std::pair<Cluster, long long>> out(counts.begin(), counts.end());
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        return out;
    }
};

// The (k+1)-th largest value; ties are kept as-is and resolved downstream by
// the strict-exceedance rule.
inline double threshold_from_level(std::span<const double> norms, long long k) {
    const long long n = static_cast<long long>(norms.size());
    if (k < 1 || k > n - 1)
        throw std::invalid_argument("threshold_from_level: k must lie in [1, n-1]");
    std::vector<double> copy(norms.begin(), norms.end());
    std::nth_element(copy.begin(), copy.begin() + k, copy.end(), std::greater<double>());
    return copy[static_cast<std::size_t>(k)];
}

namespace detail {

inline ClusterCounts count_clusters_impl(const Sample& sample, std::span<const double> norms,
                                         long long k) {
    ClusterCounts cc;
    cc.requested_level = k;
    cc.sample_size = sample.n;
    cc.threshold = threshold_from_level(norms, k);
    if (!(cc.threshold > 0.0))
        throw std::invalid_argument("count_clusters: threshold is zero (degenerate sample)");

    // Pivot choices never change the projected vector, so a fixed-key local
    // generator keeps this function pure and thread-safe.
    Rng rng(0x636f756e74657273ull);
    std::vector<double> scaled(static_cast<std::size_t>(sample.d));
    for (long long i = 0; i < sample.n; ++i) {
        if (!(norms[static_cast<std::size_t>(i)] > cc.threshold)) continue;
        const auto row = sample.row(i);
        for (int j = 0; j < sample.d; ++j)
            scaled[static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(j)] / cc.threshold;
        const Cluster beta = support_cluster(project(scaled, 1.0, rng));
        ++cc.counts[beta];
        ++cc.level;
    }
    return cc;
}

}  // namespace detail

// T_n(beta): tally the support cluster of each strict exceedance projected
// onto the unit simplex at the (k+1)-th largest norm.
inline ClusterCounts count_clusters(const Sample& sample, long long k) {
    check_sample(sample);
    for (double x : sample.values)
        if (x < 0.0) throw std::invalid_argument("count_clusters: negative entry in sample");
    const auto norms = l1_norms(sample);
    return detail::count_clusters_impl(sample, norms, k);
}

// The clusters observed at this level, sorted lexicographically.
inline std::vector<Cluster> empirical_cluster_set(const ClusterCounts& cc) {
    std::vector<Cluster> out;
    out.reserve(cc.counts.size());
    for (const auto& [c, cnt] : cc.counts) out.push_back(c);
    std::sort(out.begin(), out.end());
    return out;
}

// Renormalized frequencies of the s_hat most frequent clusters.
inline ProbabilityVector zeta_estimator(const ClusterCounts& cc, long long s_hat) {
    if (s_hat < 1 || s_hat > cc.distinct())
        throw std::invalid_argument("zeta_estimator: s_hat out of range");
    const auto sorted = cc.sorted_desc();
    double mass = 0.0;
    for (long long i = 0; i < s_hat; ++i) mass += static_cast<double>(sorted[static_cast<std::size_t>(i)].second);
    ProbabilityVector zeta;
    for (long long i = 0; i < s_hat; ++i) {
        const auto& [beta, cnt] = sorted[static_cast<std::size_t>(i)];
        zeta.entries[beta] = static_cast<double>(cnt) / mass;
    }
    return zeta;
}

// Tail-index estimate from the top-k log-spacings of the norms,
// alpha(k) = (mean_{j<=k} log x_(j) - log x_(k))^{-1} with x_(j) the j-th
// largest value.
inline double hill_estimator(std::span<const double> norms, long long k) {
    const long long n = static_cast<long long>(norms.size());
    if (k < 2 || k > n) throw std::invalid_argument("hill_estimator: need 2 <= k <= n");
    std::vector<double> top(norms.begin(), norms.end());
    std::partial_sort(top.begin(), top.begin() + k, top.end(), std::greater<double>());
    top.resize(static_cast<std::size_t>(k));
    if (!(top.back() > 0.0))
        throw std::domain_error("hill_estimator: nonpositive norm among the top k");
    double mean_log = 0.0;
    for (double x : top) mean_log += std::log(x);
    mean_log /= static_cast<double>(k);
    const double denom = mean_log - std::log(top.back());
    if (!(denom > 0.0))
        throw std::domain_error("hill_estimator: degenerate input (top-k norms all equal)");
    return 1.0 / denom;
}

struct HillPoint {
    long long k = 0;
    std::optional<double> alpha;  // empty marks a degenerate k
};

inline std::vector<HillPoint> hill_curve(std::span<const double> norms, long long k_min,
                                         long long k_max, long long step = 1) {
    if (k_min > k_max || step < 1) throw std::invalid_argument("hill_curve: empty range");
    std::vector<HillPoint> out;
    for (long long k = k_min; k <= k_max; k += step) {
        HillPoint p;
        p.k = k;
        try {
            p.alpha = hill_estimator(norms, k);
        } catch (const std::exception&) {
            p.alpha = std::nullopt;
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace muscle
