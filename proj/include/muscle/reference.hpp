#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "muscle/cluster.hpp"
#include "muscle/projection.hpp"
#include "muscle/synthetic.hpp"
#include "muscle/tail.hpp"

namespace muscle {

// A probability vector over clusters with a record of how it was obtained.
struct ReferenceDistribution {
    ProbabilityVector pstar;
    std::string provenance;  // "exact" or "monte-carlo(N)"
    long long mc_kept = 0;
    long long mc_total = 0;
    std::uint64_t seed = 0;
};

// Asymptotic independence: mass 1/d on each axis.
inline ReferenceDistribution reference_pstar_axes(int d) {
    if (d < 2) throw std::invalid_argument("reference_pstar_axes: d must be >= 2");
    ReferenceDistribution ref;
    ref.provenance = "exact";
    for (int j = 0; j < d; ++j) ref.pstar.entries[Cluster::singleton(j)] = 1.0 / static_cast<double>(d);
    return ref;
}

namespace detail {

// Chunked two-pass estimator of the limit cluster probabilities of a row
// sampler: pass 1 finds the (N+1)-th largest norm among M draws, pass 2
// regenerates the draws and tallies the support clusters of the strict
// exceedances. Chunk streams are fixed (independent of the thread count), so
// the result depends only on (sampler, N, M).
inline ProbabilityVector monte_carlo_pstar_core(
    const std::function<void(std::uint64_t chunk, long long count,
                             const std::function<void(std::span<const double>)>& sink)>& stream_rows,
    int d, long long keep, long long total, int threads, long long* kept_out) {
    constexpr long long kChunks = 64;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, kChunks));

    const auto chunk_count = [&](long long c) {
        return total / kChunks + (c < total % kChunks ? 1 : 0);
    };

    // Pass 1: top-(keep+1) norms per chunk, merged into the global threshold.
    std::vector<std::future<std::vector<double>>> norm_jobs;
    for (int t = 0; t < threads; ++t) {
        norm_jobs.push_back(std::async(std::launch::async, [&, t]() {
            std::vector<double> top;
            for (long long c = t; c < kChunks; c += threads) {
                std::vector<double> norms;
                norms.reserve(static_cast<std::size_t>(chunk_count(c)));
                stream_rows(static_cast<std::uint64_t>(c), chunk_count(c),
                            [&](std::span<const double> row) {
                                double s = 0.0;
                                for (double x : row) s += x;
                                norms.push_back(s);
                            });
                top.insert(top.end(), norms.begin(), norms.end());
                if (static_cast<long long>(top.size()) > keep + 1) {
                    std::nth_element(top.begin(), top.begin() + keep + 1, top.end(),
                                     std::greater<double>());
                    top.resize(static_cast<std::size_t>(keep + 1));
                }
            }
            return top;
        }));
    }
    std::vector<double> all;
    for (auto& job : norm_jobs) {
        const auto part = job.get();
        all.insert(all.end(), part.begin(), part.end());
    }
    if (static_cast<long long>(all.size()) <= keep)
        throw std::invalid_argument("monte_carlo_pstar: fewer draws than N");
    std::nth_element(all.begin(), all.begin() + keep, all.end(), std::greater<double>());
    const double u = all[static_cast<std::size_t>(keep)];
    if (!(u > 0.0)) throw std::domain_error("monte_carlo_pstar: degenerate threshold");

    // Pass 2: regenerate and tally support clusters of the strict exceedances.
    using CountMap = std::unordered_map<Cluster, long long, ClusterHash>;
    std::vector<std::future<CountMap>> tally_jobs;
    for (int t = 0; t < threads; ++t) {
        tally_jobs.push_back(std::async(std::launch::async, [&, t]() {
            CountMap counts;
            Rng pivot_rng(0x6d635f7069766f74ull);
            std::vector<double> scaled(static_cast<std::size_t>(d));
            for (long long c = t; c < kChunks; c += threads) {
                stream_rows(static_cast<std::uint64_t>(c), chunk_count(c),
                            [&](std::span<const double> row) {
                                double s = 0.0;
                                for (double x : row) s += x;
                                if (!(s > u)) return;
                                for (int j = 0; j < d; ++j)
                                    scaled[static_cast<std::size_t>(j)] =
                                        row[static_cast<std::size_t>(j)] / u;
                                ++counts[support_cluster(project(scaled, 1.0, pivot_rng))];
                            });
            }
            return counts;
        }));
    }
    CountMap merged;
    for (auto& job : tally_jobs) {
        for (const auto& [c, cnt] : job.get()) merged[c] += cnt;
    }

    long long kept = 0;
    for (const auto& [c, cnt] : merged) kept += cnt;
    if (kept_out) *kept_out = kept;

    ProbabilityVector pstar;
    for (const auto& [c, cnt] : merged)
        pstar.entries[c] = static_cast<double>(cnt) / static_cast<double>(kept);
    return pstar;
}

}  // namespace detail

// Estimate p*(beta) = P(Z in C_beta) as the empirical limit of the projected
// exceedance frequencies: draw N * oversample rows, keep the top N by l1
// norm, project at the (N+1)-th norm and tally. The high threshold
// (N / draws <= 1e-3 at the default oversample) stands in for the t -> inf
// limit.
inline ReferenceDistribution monte_carlo_pstar(const GeneratorSpec& spec, long long keep,
                                               long long oversample = 1000, int threads = 0) {
    if (keep < 100000) throw std::invalid_argument("monte_carlo_pstar: N must be >= 1e5");
    if (oversample < 2) throw std::invalid_argument("monte_carlo_pstar: oversample must be >= 2");
    if (keep > (1ll << 40) / oversample)
        throw std::invalid_argument("monte_carlo_pstar: total draw count overflows the budget");
    RowGenerator::validate(spec);
    const long long total = keep * oversample;

    ReferenceDistribution ref;
    ref.mc_total = total;
    ref.seed = spec.seed;
    ref.provenance = "monte-carlo(" + std::to_string(keep) + ")";
    ref.pstar = detail::monte_carlo_pstar_core(
        [&spec](std::uint64_t chunk, long long count,
                const std::function<void(std::span<const double>)>& sink) {
            RowGenerator gen(spec, streams::mc_chunk_base + chunk);
            std::vector<double> row(static_cast<std::size_t>(spec.dim));
            for (long long i = 0; i < count; ++i) {
                gen.next(row);
                sink(row);
            }
        },
        spec.dim, keep, total, threads, &ref.mc_kept);
    return ref;
}

// Hellinger distance between probability vectors over the union of supports.
inline double hellinger(const ProbabilityVector& p, const ProbabilityVector& q) {
    if (std::abs(p.total() - 1.0) > 1e-6 || std::abs(q.total() - 1.0) > 1e-6)
        throw std::invalid_argument("hellinger: inputs must sum to 1");
    double acc = 0.0;
    for (const auto& [c, pv] : p.entries) {
        const double dv = std::sqrt(pv) - std::sqrt(q.at(c));
        acc += dv * dv;
    }
    for (const auto& [c, qv] : q.entries) {
        if (!p.entries.contains(c)) acc += qv;
    }
    return std::sqrt(acc / 2.0);
}

}  // namespace muscle
