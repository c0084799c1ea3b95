#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "muscle/csv.hpp"
#include "muscle/experiment.hpp"
#include "muscle/fetch.hpp"
#include "muscle/report.hpp"
#include "muscle/score_test.hpp"
#include "muscle/selection.hpp"
#include "muscle/synthetic.hpp"

namespace muscle {

struct RunConfig {
    // input: either a CSV path or a named preset
    std::string input;
    std::string preset;  // independence | max-mixture | wind | financial
    HeaderPolicy header = HeaderPolicy::Auto;

    // generator presets
    int dim = 5;
    long long n = 10000;
    double rho = 0.0;
    double alpha_logistic = 0.5;

    // preprocessing
    bool abs_value = false;
    std::optional<double> alpha;   // explicit power-transform exponent
    std::optional<long long> hill_k;  // estimate the exponent at this order

    // level grid
    double kmin_frac = 0.005;
    double kmax_frac = 0.10;
    int grid_points = 40;

    std::uint64_t seed = 1;
    std::string out_dir = "muscle-out";
    std::string cache_dir;  // dataset cache for fetch-backed presets
    bool allow_network = false;
};

namespace detail {

inline void validate_grid(const RunConfig& c) {
    if (!(c.kmin_frac > 0.0 && c.kmax_frac < 1.0 && c.kmin_frac < c.kmax_frac))
        throw std::invalid_argument("grid fractions must satisfy 0 < kmin < kmax < 1");
    if (c.grid_points < 1) throw std::invalid_argument("grid needs at least one point");
}

inline Dataset dataset_for(const RunConfig& c, std::string& source, bool& abs_flag,
                           std::optional<double>& preset_alpha) {
    abs_flag = c.abs_value;
    preset_alpha.reset();
    if (!c.input.empty()) {
        source = c.input;
        return load_csv(c.input, c.header);
    }
    if (c.preset == "independence" || c.preset == "max-mixture") {
        GeneratorSpec spec;
        spec.kind = c.preset == "independence" ? GeneratorSpec::Kind::GaussianCopulaPareto
                                               : GeneratorSpec::Kind::MaxMixture;
        spec.dim = c.preset == "max-mixture" ? 5 : c.dim;
        spec.rho = c.rho;
        spec.alpha = c.alpha_logistic;
        spec.seed = c.seed;
        source = c.preset;
        Dataset ds;
        ds.sample = generate(spec, c.n);
        for (int j = 0; j < ds.sample.d; ++j) ds.columns.push_back("c" + std::to_string(j));
        return ds;
    }
    if (c.preset == "wind" || c.preset == "financial") {
        FetchOptions fo;
        fo.cache_dir = c.cache_dir;
        fo.allow_network = c.allow_network;
        const std::string name = c.preset == "wind" ? "wind-speed" : "industry-portfolios";
        const auto fetched = fetch_dataset(name, fo);
        source = fetched.csv_path;
        if (c.preset == "wind") {
            preset_alpha = 10.7;  // documented Hill estimate for this dataset
        } else {
            preset_alpha = 2.99;
            abs_flag = true;  // returns are signed; the study concerns their size
        }
        return load_csv(fetched.csv_path, HeaderPolicy::Header);
    }
    throw std::invalid_argument("unknown preset '" + c.preset + "' and no input file");
}

}  // namespace detail

// Optional componentwise absolute value, then a power transform with either
// an explicit exponent or one estimated from the norms at the given Hill
// order.
inline std::pair<Sample, double> preprocess(const Sample& input, bool abs_value,
                                            std::optional<double> alpha,
                                            std::optional<long long> hill_order) {
    Sample s = abs_value ? abs_values(input) : input;
    double a = 1.0;
    if (alpha) {
        a = *alpha;
    } else if (hill_order) {
        a = hill_estimator(l1_norms(s), *hill_order);
    }
    return {power_transform(s, a), a};
}

inline ClusterReport run_muscle(const RunConfig& config) {
    detail::validate_grid(config);

    ClusterReport report;
    bool abs_flag = false;
    std::optional<double> preset_alpha;
    Dataset ds = detail::dataset_for(config, report.source, abs_flag, preset_alpha);

    // Exponent priority: explicit --alpha, then --hill-k estimation, then the
    // preset's documented value.
    std::optional<double> alpha = config.alpha;
    if (!alpha && !config.hill_k) alpha = preset_alpha;
    const auto [sample, alpha_used] = preprocess(ds.sample, abs_flag, alpha, config.hill_k);

    report.n = sample.n;
    report.d = sample.d;
    report.columns = ds.columns;
    report.dropped_rows = ds.dropped_rows;
    report.abs_applied = abs_flag;
    report.alpha_used = alpha_used;
    if (!alpha && config.hill_k) report.hill_k = *config.hill_k;
    report.seed = config.seed;

    const auto grid =
        default_level_grid(sample.n, config.kmin_frac, config.kmax_frac, config.grid_points);
    const SelectionResult sel = run(sample, grid);

    report.k_hat = sel.k_hat;
    report.k_effective = sel.k_effective;
    report.s_hat = sel.s_hat;
    report.threshold = sel.threshold;
    report.criterion = sel.criterion;
    report.curves = sel.curves;

    const auto sorted = sel.counts.sorted_desc();
    for (int i = 0; i < sel.s_hat; ++i) {
        const auto& [cluster, count] = sorted[static_cast<std::size_t>(i)];
        ClusterEntry entry;
        entry.indices = cluster.indices();
        for (int idx : entry.indices)
            entry.names.push_back(idx < static_cast<int>(report.columns.size())
                                      ? report.columns[static_cast<std::size_t>(idx)]
                                      : "c" + std::to_string(idx));
        entry.count = count;
        entry.zeta = sel.zeta.at(cluster);
        entry.maximal = sel.maximal.at(cluster);
        entry.full_cluster = cluster.size() == sample.d;
        report.clusters.push_back(entry);
    }
    return report;
}

namespace detail {

inline int fail_with_error_json(const std::exception& e) {
    nlohmann::json err;
    err["error"] = {{"type", "runtime"}, {"message", e.what()}};
    std::cout << err.dump(2) << std::endl;
    return 1;
}

inline void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

}  // namespace detail

inline int cmd_muscle(const RunConfig& config) {
    try {
        const ClusterReport report = run_muscle(config);
        detail::ensure_dir(config.out_dir);
        write_report_file(report, config.out_dir + "/report.json");
        std::ofstream curves(config.out_dir + "/curves.csv");
        write_curves_csv(curves, report.curves);
        if (report.dropped_rows > 0)
            std::cout << "note: dropped " << report.dropped_rows
                      << " rows with missing values" << std::endl;
        std::cout << "k_hat=" << report.k_hat << " s_hat=" << report.s_hat
                  << " clusters=" << report.clusters.size() << " -> " << config.out_dir
                  << "/report.json" << std::endl;
        return 0;
    } catch (const std::exception& e) {
        return detail::fail_with_error_json(e);
    }
}

struct HillConfig {
    std::string input;
    HeaderPolicy header = HeaderPolicy::Auto;
    bool abs_value = false;
    long long kmin = 2;
    long long kmax = 0;  // 0: up to n
    long long step = 1;
    std::string out_dir = "muscle-out";
};

inline int cmd_hill(const HillConfig& config) {
    try {
        const Dataset ds = load_csv(config.input, config.header);
        const Sample s = config.abs_value ? abs_values(ds.sample) : ds.sample;
        const auto norms = l1_norms(s);
        const long long kmax = config.kmax > 0 ? config.kmax : s.n;
        const auto curve = hill_curve(norms, config.kmin, kmax, config.step);
        detail::ensure_dir(config.out_dir);
        std::ofstream out(config.out_dir + "/hill.csv");
        out.precision(17);
        out << "k,alpha\n";
        for (const auto& p : curve) {
            out << p.k << ",";
            if (p.alpha) out << *p.alpha;
            out << "\n";
        }
        std::cout << "hill curve (" << curve.size() << " points) -> " << config.out_dir
                  << "/hill.csv" << std::endl;
        return 0;
    } catch (const std::exception& e) {
        return detail::fail_with_error_json(e);
    }
}

struct SimulateConfig {
    std::string preset = "independence";  // independence | max-mixture
    int dim = 5;
    long long n = 10000;
    double rho = 0.0;
    double alpha_logistic = 0.5;
    std::uint64_t seed = 1;
    std::string out;  // sample CSV path
    std::string pstar_out;  // optional reference fixture path
    long long pstar_keep = 100000;
    long long pstar_oversample = 1000;
};

inline GeneratorSpec spec_from(const SimulateConfig& config) {
    GeneratorSpec spec;
    if (config.preset == "independence") {
        spec.kind = GeneratorSpec::Kind::GaussianCopulaPareto;
        spec.dim = config.dim;
    } else if (config.preset == "max-mixture") {
        spec.kind = GeneratorSpec::Kind::MaxMixture;
        spec.dim = 5;
    } else {
        throw std::invalid_argument("unknown generator preset '" + config.preset + "'");
    }
    spec.rho = config.rho;
    spec.alpha = config.alpha_logistic;
    spec.seed = config.seed;
    return spec;
}

inline int cmd_simulate(const SimulateConfig& config) {
    try {
        const GeneratorSpec spec = spec_from(config);
        if (!config.out.empty()) {
            const Sample sample = generate(spec, config.n);
            std::vector<std::string> names;
            for (int j = 0; j < sample.d; ++j) names.push_back("c" + std::to_string(j));
            save_csv(config.out, sample, names);
            std::cout << "sample " << sample.n << "x" << sample.d << " -> " << config.out
                      << std::endl;
        }
        if (!config.pstar_out.empty()) {
            const auto ref =
                monte_carlo_pstar(spec, config.pstar_keep, config.pstar_oversample);
            write_reference_file(ref, config.pstar_out);
            std::cout << "reference (" << ref.provenance << ", " << ref.pstar.entries.size()
                      << " clusters) -> " << config.pstar_out << std::endl;
        }
        if (config.out.empty() && config.pstar_out.empty())
            throw std::invalid_argument("simulate: nothing to do (set --out and/or --pstar-out)");
        return 0;
    } catch (const std::exception& e) {
        return detail::fail_with_error_json(e);
    }
}

struct BenchConfig {
    std::string preset;  // desk-independence | desk-max-mixture | paper-independence
    ExperimentConfig experiment;
    std::string fixture;  // reference fixture for max-mixture scoring
    std::string out_dir = "muscle-out";
};

inline ExperimentConfig bench_preset(const std::string& name) {
    ExperimentConfig e;
    if (name == "desk-independence") {
        e.kind = GeneratorSpec::Kind::GaussianCopulaPareto;
        e.dim = 10;
        e.rho_grid = {0.0, 0.25, 0.5, 0.75};
        e.n = 10000;
        e.replications = 10;
        e.reference_mode = ReferenceMode::Axes;
    } else if (name == "desk-max-mixture") {
        e.kind = GeneratorSpec::Kind::MaxMixture;
        e.dim = 5;
        e.rho_grid = {0.5};
        e.alpha_grid = {0.5};
        e.n = 10000;
        e.replications = 20;
        e.reference_mode = ReferenceMode::MonteCarlo;  // fixture overrides when given
    } else if (name == "paper-independence") {
        e.kind = GeneratorSpec::Kind::GaussianCopulaPareto;
        e.dim = 40;
        e.rho_grid = {0.0, 0.25, 0.5, 0.75};
        e.n = 30000;
        e.replications = 100;
        e.reference_mode = ReferenceMode::Axes;
    } else if (name == "paper-max-mixture") {
        e.kind = GeneratorSpec::Kind::MaxMixture;
        e.dim = 5;
        e.rho_grid = {0.0, 0.25, 0.5, 0.75};
        e.alpha_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        e.n = 10000;
        e.replications = 100;
        e.reference_mode = ReferenceMode::MonteCarlo;
    } else {
        throw std::invalid_argument("unknown bench preset '" + name + "'");
    }
    return e;
}

inline int cmd_bench(const BenchConfig& config) {
    try {
        ExperimentConfig e = config.preset.empty() ? config.experiment
                                                   : bench_preset(config.preset);
        if (!config.preset.empty()) e.master_seed = config.experiment.master_seed;
        if (!config.fixture.empty()) {
            e.reference = read_reference_file(config.fixture);
            e.reference_mode = ReferenceMode::Provided;
        }
        const ExperimentReport report = run_experiment(e);
        detail::ensure_dir(config.out_dir);
        write_experiment_report_file(report, config.out_dir + "/experiment.json");
        std::ofstream curves(config.out_dir + "/experiment_curves.csv");
        write_experiment_curves_csv(curves, report);
        for (const auto& s : report.summaries) {
            std::cout << "config " << s.config_index << " (rho=" << s.rho << ", alpha=" << s.alpha
                      << "): hellinger " << s.hellinger_mean << " +/- " << s.hellinger_std
                      << ", recovery " << s.recovery_mean << ", failures " << s.n_failed
                      << std::endl;
        }
        return 0;
    } catch (const std::exception& e) {
        return detail::fail_with_error_json(e);
    }
}

struct ScoreTestConfig {
    std::string input;
    HeaderPolicy header = HeaderPolicy::Auto;
    bool abs_value = false;
    long long k = 0;
    int s1 = 0;
    int s2 = 0;
    double level = 0.05;
    std::string out;  // optional JSON path
};

inline int cmd_score_test(const ScoreTestConfig& config) {
    try {
        const Dataset ds = load_csv(config.input, config.header);
        const Sample s = config.abs_value ? abs_values(ds.sample) : ds.sample;
        const auto counts = count_clusters(s, config.k);
        const auto res = score_test(counts, config.s1, config.s2, config.level);
        nlohmann::json j = {{"k", config.k},
                            {"k_effective", counts.level},
                            {"s1", config.s1},
                            {"s2", config.s2},
                            {"level", config.level},
                            {"statistic", res.statistic},
                            {"dof", res.dof},
                            {"p_value", res.p_value},
                            {"reject", res.reject},
                            {"rho_hat", res.rho_hat}};
        std::cout << j.dump(2) << std::endl;
        if (!config.out.empty()) {
            std::ofstream out(config.out);
            out << j.dump(2) << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        return detail::fail_with_error_json(e);
    }
}

struct FetchConfig {
    std::string name;
    std::string cache_dir;
    bool allow_network = false;
    std::string sha256;
    std::string base_url;
};

inline int cmd_fetch(const FetchConfig& config) {
    try {
        FetchOptions fo;
        fo.cache_dir = config.cache_dir;
        fo.allow_network = config.allow_network;
        fo.sha256_override = config.sha256;
        fo.base_url_override = config.base_url;
        const auto res = fetch_dataset(config.name, fo);
        std::cout << (res.from_cache ? "cached: " : "fetched: ") << res.csv_path;
        if (!res.sha256.empty()) std::cout << " (sha256 " << res.sha256 << ")";
        std::cout << std::endl;
        return 0;
    } catch (const std::exception& e) {
        return detail::fail_with_error_json(e);
    }
}

}  // namespace muscle
