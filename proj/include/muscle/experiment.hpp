#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "muscle/reference.hpp"
#include "muscle/selection.hpp"
#include "muscle/synthetic.hpp"

namespace muscle {

struct KGridPolicy {
    double kmin_frac = 0.005;
    double kmax_frac = 0.10;
    int points = 40;
};

// How each grid point obtains its reference distribution for scoring.
enum class ReferenceMode {
    Axes,        // exact 1/d on the axes (asymptotic independence)
    Provided,    // config.reference, typically loaded from a fixture
    MonteCarlo,  // recompute per grid point (expensive)
};

struct ExperimentConfig {
    GeneratorSpec::Kind kind = GeneratorSpec::Kind::GaussianCopulaPareto;
    int dim = 10;
    std::vector<double> rho_grid = {0.0};
    std::vector<double> alpha_grid = {0.5};  // ignored by the copula generator
    long long n = 10000;
    int replications = 10;
    KGridPolicy grid;
    std::uint64_t master_seed = 1;
    ReferenceMode reference_mode = ReferenceMode::Axes;
    std::optional<ReferenceDistribution> reference;
    long long mc_keep = 100000;
    long long mc_oversample = 1000;
    int threads = 0;
};

struct ReplicationRecord {
    int config_index = 0;
    int replication = 0;
    bool ok = false;
    std::string error;
    long long k_hat = 0;
    int s_hat = 0;
    double hellinger = 0.0;
    double recovery = 0.0;  // fraction of reference-support clusters found
    std::vector<Cluster> clusters;
    std::vector<LevelRecord> curves;
    double wall_ms = 0.0;
};

struct ConfigSummary {
    int config_index = 0;
    double rho = 0.0;
    double alpha = 0.0;
    int n_ok = 0;
    int n_failed = 0;
    double hellinger_mean = 0.0;
    double hellinger_std = 0.0;
    double recovery_mean = 0.0;
};

struct ExperimentReport {
    std::vector<ConfigSummary> summaries;
    std::vector<ReplicationRecord> records;
    double wall_ms_total = 0.0;
};

namespace detail {

inline double support_recovery(const std::vector<Cluster>& found, const ProbabilityVector& ref) {
    if (ref.entries.empty()) return 0.0;
    int hit = 0;
    for (const auto& [c, p] : ref.entries) {
        for (const auto& f : found) {
            if (f == c) {
                ++hit;
                break;
            }
        }
    }
    return static_cast<double>(hit) / static_cast<double>(ref.entries.size());
}

}  // namespace detail

// Fraction of reference-support clusters recovered in S*, averaged over the
// successful replications of a report.
inline double recovery_rate(const ExperimentReport& report, const ReferenceDistribution& ref) {
    double acc = 0.0;
    int n = 0;
    for (const auto& rec : report.records) {
        if (!rec.ok) continue;
        acc += detail::support_recovery(rec.clusters, ref.pstar);
        ++n;
    }
    return n == 0 ? 0.0 : acc / static_cast<double>(n);
}

// Run the replication grid: for each (rho, alpha) configuration draw
// `replications` independent samples, run the full selection pipeline, and
// score the estimated cluster probabilities against the reference. Failures
// are recorded per replication and excluded from the aggregates. The output
// depends only on the config (replication streams are derived from the
// master seed), never on thread scheduling.
inline ExperimentReport run_experiment(const ExperimentConfig& config) {
    if (config.replications < 1) throw std::invalid_argument("run_experiment: replications >= 1");
    if (config.rho_grid.empty()) throw std::invalid_argument("run_experiment: empty rho grid");
    const bool mixture = config.kind == GeneratorSpec::Kind::MaxMixture;
    const std::vector<double> alphas = mixture ? config.alpha_grid : std::vector<double>{0.0};
    if (alphas.empty()) throw std::invalid_argument("run_experiment: empty alpha grid");
    if (config.reference_mode == ReferenceMode::Provided && !config.reference)
        throw std::invalid_argument("run_experiment: reference mode 'Provided' without a reference");

    const auto t0 = std::chrono::steady_clock::now();
    ExperimentReport report;

    int threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, threads);

    int config_index = 0;
    for (double rho : config.rho_grid) {
        for (double alpha : alphas) {
            GeneratorSpec base;
            base.kind = config.kind;
            base.dim = config.dim;
            base.rho = rho;
            base.alpha = mixture ? alpha : 0.5;

            ReferenceDistribution ref;
            switch (config.reference_mode) {
                case ReferenceMode::Axes:
                    ref = reference_pstar_axes(config.dim);
                    break;
                case ReferenceMode::Provided:
                    ref = *config.reference;
                    break;
                case ReferenceMode::MonteCarlo: {
                    GeneratorSpec mc = base;
                    mc.seed = Rng::fold(config.master_seed, 0x7265666572656e63ull);
                    ref = monte_carlo_pstar(mc, config.mc_keep, config.mc_oversample,
                                            config.threads);
                    break;
                }
            }

            const auto run_one = [&, config_index](int rep) {
                ReplicationRecord rec;
                rec.config_index = config_index;
                rec.replication = rep;
                const auto r0 = std::chrono::steady_clock::now();
                try {
                    GeneratorSpec spec = base;
                    spec.seed = Rng::fold(Rng::fold(config.master_seed,
                                                    static_cast<std::uint64_t>(config_index)),
                                          static_cast<std::uint64_t>(rep));
                    const Sample sample = generate(spec, config.n);
                    const auto grid = default_level_grid(config.n, config.grid.kmin_frac,
                                                         config.grid.kmax_frac, config.grid.points);
                    const SelectionResult sel = run(sample, grid);
                    rec.k_hat = sel.k_hat;
                    rec.s_hat = sel.s_hat;
                    rec.clusters = sel.clusters;
                    rec.curves = sel.curves;
                    rec.hellinger = hellinger(ref.pstar, sel.zeta);
                    rec.recovery = detail::support_recovery(sel.clusters, ref.pstar);
                    rec.ok = true;
                } catch (const std::exception& e) {
                    rec.ok = false;
                    rec.error = e.what();
                }
                rec.wall_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - r0)
                                  .count();
                return rec;
            };

            std::vector<ReplicationRecord> records(static_cast<std::size_t>(config.replications));
            std::vector<std::future<void>> jobs;
            std::atomic<int> cursor{0};
            for (int t = 0; t < std::min(threads, config.replications); ++t) {
                jobs.push_back(std::async(std::launch::async, [&]() {
                    for (int rep = cursor.fetch_add(1); rep < config.replications;
                         rep = cursor.fetch_add(1))
                        records[static_cast<std::size_t>(rep)] = run_one(rep);
                }));
            }
            for (auto& j : jobs) j.get();

            ConfigSummary sum;
            sum.config_index = config_index;
            sum.rho = rho;
            sum.alpha = mixture ? alpha : 0.0;
            double h_acc = 0.0, r_acc = 0.0;
            for (const auto& rec : records) {
                if (rec.ok) {
                    ++sum.n_ok;
                    h_acc += rec.hellinger;
                    r_acc += rec.recovery;
                } else {
                    ++sum.n_failed;
                }
                report.records.push_back(rec);
            }
            if (sum.n_ok > 0) {
                sum.hellinger_mean = h_acc / sum.n_ok;
                sum.recovery_mean = r_acc / sum.n_ok;
                double sq = 0.0;
                for (const auto& rec : records) {
                    if (!rec.ok) continue;
                    const double d = rec.hellinger - sum.hellinger_mean;
                    sq += d * d;
                }
                sum.hellinger_std = sum.n_ok > 1 ? std::sqrt(sq / (sum.n_ok - 1)) : 0.0;
            }
            report.summaries.push_back(sum);
            ++config_index;
        }
    }

    report.wall_ms_total =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace muscle
