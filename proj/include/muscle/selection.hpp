#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "muscle/tail.hpp"

namespace muscle {

// One multinomial fit: s leading clusters get free probabilities, the
// remaining r - s share a common bias probability.
struct ModelFit {
    long long k = 0;  // effective exceedance count
    int s = 0;
    long long r = 0;  // number of observed clusters
    double log_likelihood = 0.0;
    double bias_criterion = 0.0;  // -logL + (s+1)
    double threshold_criterion = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double log_likelihood_sorted(std::span<const long long> counts_desc, long long k, int s) {
    const long long r = static_cast<long long>(counts_desc.size());
    if (s < 1 || s > r) throw std::invalid_argument("log_likelihood_at_mle: s out of range");

    double logl = std::lgamma(static_cast<double>(k) + 1.0);
    double head = 0.0;  // sum of the s leading counts
    for (long long i = 0; i < r; ++i) {
        const double t = static_cast<double>(counts_desc[static_cast<std::size_t>(i)]);
        logl -= std::lgamma(t + 1.0);
        if (i < s) {
            head += t;
            if (t > 0.0) logl += t * std::log(t / static_cast<double>(k));
        }
    }
    if (s < r) {
        const double tail = static_cast<double>(k) - head;
        const double bias_prob = (1.0 - head / static_cast<double>(k)) / static_cast<double>(r - s);
        if (!(bias_prob > 0.0))
            throw std::domain_error("log_likelihood_at_mle: zero bias probability with occupied bias block");
        logl += tail * std::log(bias_prob);
    }
    return logl;
}

inline std::vector<long long> sorted_count_values(const ClusterCounts& cc) {
    const auto sorted = cc.sorted_desc();
    std::vector<long long> values(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) values[i] = sorted[i].second;
    return values;
}

}  // namespace detail

// Log-likelihood of the fitted model at the MLE p_j = T_j / k.
inline double log_likelihood_at_mle(const ClusterCounts& cc, int s) {
    if (cc.counts.empty()) throw std::invalid_argument("log_likelihood_at_mle: empty counts");
    return detail::log_likelihood_sorted(detail::sorted_count_values(cc), cc.level, s);
}

// Penalized fit over s = 1..r; returns the minimizer (smallest s on ties)
// together with every evaluated fit.
inline std::pair<int, std::vector<ModelFit>> bias_select(const ClusterCounts& cc) {
    if (cc.counts.empty()) throw std::invalid_argument("bias_select: empty counts");
    const auto values = detail::sorted_count_values(cc);
    const long long r = static_cast<long long>(values.size());

    std::vector<ModelFit> fits;
    fits.reserve(static_cast<std::size_t>(r));
    int best = 1;
    for (int s = 1; s <= r; ++s) {
        ModelFit fit;
        fit.k = cc.level;
        fit.s = s;
        fit.r = r;
        fit.log_likelihood = detail::log_likelihood_sorted(values, cc.level, s);
        fit.bias_criterion = -fit.log_likelihood + static_cast<double>(s + 1);
        fits.push_back(fit);
        if (fit.bias_criterion < fits[static_cast<std::size_t>(best - 1)].bias_criterion) best = s;
    }
    return {best, std::move(fits)};
}

// Level-selection criterion: (1/k) (-logL + (s+1) - k log(1 - k/n)).
inline double threshold_criterion(const ModelFit& fit, long long n) {
    if (fit.k >= n) throw std::invalid_argument("threshold_criterion: k must be below n");
    const double k = static_cast<double>(fit.k);
    return (fit.bias_criterion - k * std::log1p(-k / static_cast<double>(n))) / k;
}

// True iff the cluster is not a strict subset of another cluster in the set.
inline std::map<Cluster, bool> maximal_clusters(const std::vector<Cluster>& clusters) {
    if (clusters.empty()) throw std::invalid_argument("maximal_clusters: empty set");
    std::map<Cluster, bool> flags;
    for (const auto& c : clusters) {
        bool maximal = true;
        for (const auto& other : clusters) {
            if (c.proper_subset_of(other)) {
                maximal = false;
                break;
            }
        }
        flags[c] = maximal;
    }
    return flags;
}

struct LevelRecord {
    long long k_requested = 0;
    long long k_effective = 0;
    long long s_n = 0;  // clusters observed at this level
    int s_hat = 0;
    double criterion = 0.0;
    double threshold = 0.0;
};

struct SelectionResult {
    long long k_hat = 0;  // chosen grid level
    long long k_effective = 0;
    int s_hat = 0;
    double threshold = 0.0;
    double criterion = 0.0;
    std::vector<Cluster> clusters;  // S*, by descending count (lex on ties)
    ProbabilityVector zeta;
    std::map<Cluster, bool> maximal;
    bool contains_full_cluster = false;  // {1..d} reported: interpret with care
    std::vector<LevelRecord> curves;
    ClusterCounts counts;  // at the chosen level
};

// Evenly spaced integer levels across [lo_frac, hi_frac] of n.
inline std::vector<long long> default_level_grid(long long n, double lo_frac = 0.005,
                                                 double hi_frac = 0.10, int points = 40) {
    if (!(lo_frac > 0.0) || !(hi_frac < 1.0) || !(lo_frac < hi_frac) || points < 1)
        throw std::invalid_argument("default_level_grid: need 0 < lo < hi < 1 and points >= 1");
    if (n < 2) throw std::invalid_argument("default_level_grid: need n >= 2");
    const double lo = lo_frac * static_cast<double>(n);
    const double hi = hi_frac * static_cast<double>(n);
    std::vector<long long> grid;
    for (int i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        long long k = std::llround(lo + t * (hi - lo));
        k = std::clamp(k, 1ll, n - 1);
        grid.push_back(k);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

// The full pipeline: for every level in the grid fit the cluster model,
// choose (k, s) minimizing the threshold criterion, and assemble the
// extremal-cluster set with its probability estimate.
inline SelectionResult run(const Sample& sample, std::span<const long long> k_grid) {
    check_sample(sample);
    for (double x : sample.values)
        if (x < 0.0) throw std::invalid_argument("muscle: negative entry in sample");
    if (k_grid.empty()) throw std::invalid_argument("muscle: empty level grid");

    std::vector<long long> grid(k_grid.begin(), k_grid.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (long long k : grid)
        if (k < 1 || k > sample.n - 1) throw std::invalid_argument("muscle: level outside [1, n-1]");
    const long long k_max = grid.back();

    const auto norms = l1_norms(sample);
    long long positive = 0;
    for (double x : norms)
        if (x > 0.0) ++positive;
    if (positive < k_max + 1)
        throw std::invalid_argument("muscle: fewer than max(k)+1 nonzero norms");

    SelectionResult result;
    double best = std::numeric_limits<double>::infinity();
    for (long long k : grid) {
        const auto cc = detail::count_clusters_impl(sample, norms, k);
        if (cc.counts.empty())
            throw std::invalid_argument(
                "muscle: no strict exceedances at level " + std::to_string(k) +
                " (norms tied at the threshold)");
        const auto [s_hat, fits] = bias_select(cc);
        const double crit = threshold_criterion(fits[static_cast<std::size_t>(s_hat - 1)], sample.n);

        LevelRecord rec;
        rec.k_requested = k;
        rec.k_effective = cc.level;
        rec.s_n = cc.distinct();
        rec.s_hat = s_hat;
        rec.criterion = crit;
        rec.threshold = cc.threshold;
        result.curves.push_back(rec);

        if (crit < best) {  // strict: ties resolve to the smallest k
            best = crit;
            result.k_hat = k;
            result.k_effective = cc.level;
            result.s_hat = s_hat;
            result.threshold = cc.threshold;
            result.criterion = crit;
            result.counts = cc;
        }
    }

    const auto sorted = result.counts.sorted_desc();
    for (int i = 0; i < result.s_hat; ++i)
        result.clusters.push_back(sorted[static_cast<std::size_t>(i)].first);
    result.zeta = zeta_estimator(result.counts, result.s_hat);
    result.maximal = maximal_clusters(result.clusters);
    const Cluster full = Cluster::full(sample.d);
    for (const auto& c : result.clusters)
        if (c == full) result.contains_full_cluster = true;
    return result;
}

inline SelectionResult run(const Sample& sample) {
    const auto grid = default_level_grid(sample.n);
    return run(sample, grid);
}

}  // namespace muscle
