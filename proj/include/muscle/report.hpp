#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "muscle/experiment.hpp"
#include "muscle/reference.hpp"
#include "muscle/selection.hpp"

namespace muscle {

struct ClusterEntry {
    std::vector<int> indices;
    std::vector<std::string> names;
    long long count = 0;
    double zeta = 0.0;
    bool maximal = false;
    bool full_cluster = false;

    bool operator==(const ClusterEntry&) const = default;
};

// The serialized outcome of one pipeline run. Everything here is canonical
// output: timestamps and timings live in a separate "meta" block added at
// write time and ignored on read, so identical configurations produce
// identical report bytes.
struct ClusterReport {
    std::string source;
    long long n = 0;
    int d = 0;
    std::vector<std::string> columns;
    long long dropped_rows = 0;
    bool abs_applied = false;
    double alpha_used = 1.0;
    std::optional<long long> hill_k;
    std::uint64_t seed = 0;

    long long k_hat = 0;
    long long k_effective = 0;
    int s_hat = 0;
    double threshold = 0.0;
    double criterion = 0.0;
    std::vector<ClusterEntry> clusters;
    std::vector<LevelRecord> curves;

    bool operator==(const ClusterReport&) const;
};

inline bool operator==(const LevelRecord& a, const LevelRecord& b) {
    return a.k_requested == b.k_requested && a.k_effective == b.k_effective && a.s_n == b.s_n &&
           a.s_hat == b.s_hat && a.criterion == b.criterion && a.threshold == b.threshold;
}

inline bool ClusterReport::operator==(const ClusterReport& o) const {
    return source == o.source && n == o.n && d == o.d && columns == o.columns &&
           dropped_rows == o.dropped_rows && abs_applied == o.abs_applied &&
           alpha_used == o.alpha_used && hill_k == o.hill_k && seed == o.seed &&
           k_hat == o.k_hat && k_effective == o.k_effective && s_hat == o.s_hat &&
           threshold == o.threshold && criterion == o.criterion && clusters == o.clusters &&
           curves == o.curves;
}

inline nlohmann::json to_json(const LevelRecord& rec) {
    return {{"k", rec.k_requested},     {"k_effective", rec.k_effective}, {"s_n", rec.s_n},
            {"s_hat", rec.s_hat},       {"criterion", rec.criterion},     {"threshold", rec.threshold}};
}

inline LevelRecord level_record_from_json(const nlohmann::json& j) {
    LevelRecord rec;
    rec.k_requested = j.at("k").get<long long>();
    rec.k_effective = j.at("k_effective").get<long long>();
    rec.s_n = j.at("s_n").get<long long>();
    rec.s_hat = j.at("s_hat").get<int>();
    rec.criterion = j.at("criterion").get<double>();
    rec.threshold = j.at("threshold").get<double>();
    return rec;
}

inline nlohmann::json to_json(const ClusterReport& r) {
    nlohmann::json j;
    j["dataset"] = {{"source", r.source},
                    {"n", r.n},
                    {"d", r.d},
                    {"columns", r.columns},
                    {"dropped_rows", r.dropped_rows}};
    j["preprocess"] = {{"abs", r.abs_applied}, {"alpha", r.alpha_used}};
    if (r.hill_k)
        j["preprocess"]["hill_k"] = *r.hill_k;
    else
        j["preprocess"]["hill_k"] = nullptr;
    j["seed"] = r.seed;
    j["selection"] = {{"k_hat", r.k_hat},
                      {"k_effective", r.k_effective},
                      {"s_hat", r.s_hat},
                      {"threshold", r.threshold},
                      {"criterion", r.criterion}};
    j["clusters"] = nlohmann::json::array();
    for (const auto& c : r.clusters) {
        j["clusters"].push_back({{"indices", c.indices},
                                 {"names", c.names},
                                 {"count", c.count},
                                 {"zeta", c.zeta},
                                 {"maximal", c.maximal},
                                 {"full_cluster", c.full_cluster}});
    }
    j["curves"] = nlohmann::json::array();
    for (const auto& rec : r.curves) j["curves"].push_back(to_json(rec));
    return j;
}

inline ClusterReport report_from_json(const nlohmann::json& j) {
    ClusterReport r;
    const auto& ds = j.at("dataset");
    r.source = ds.at("source").get<std::string>();
    r.n = ds.at("n").get<long long>();
    r.d = ds.at("d").get<int>();
    r.columns = ds.at("columns").get<std::vector<std::string>>();
    r.dropped_rows = ds.at("dropped_rows").get<long long>();
    const auto& pp = j.at("preprocess");
    r.abs_applied = pp.at("abs").get<bool>();
    r.alpha_used = pp.at("alpha").get<double>();
    if (!pp.at("hill_k").is_null()) r.hill_k = pp.at("hill_k").get<long long>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto& sel = j.at("selection");
    r.k_hat = sel.at("k_hat").get<long long>();
    r.k_effective = sel.at("k_effective").get<long long>();
    r.s_hat = sel.at("s_hat").get<int>();
    r.threshold = sel.at("threshold").get<double>();
    r.criterion = sel.at("criterion").get<double>();
    for (const auto& c : j.at("clusters")) {
        ClusterEntry e;
        e.indices = c.at("indices").get<std::vector<int>>();
        e.names = c.at("names").get<std::vector<std::string>>();
        e.count = c.at("count").get<long long>();
        e.zeta = c.at("zeta").get<double>();
        e.maximal = c.at("maximal").get<bool>();
        e.full_cluster = c.at("full_cluster").get<bool>();
        r.clusters.push_back(e);
    }
    for (const auto& rec : j.at("curves")) r.curves.push_back(level_record_from_json(rec));
    return r;
}

inline std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

inline void write_report_file(const ClusterReport& r, const std::string& path) {
    nlohmann::json j = to_json(r);
    j["meta"] = {{"created", iso8601_now()}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_report_file: cannot open " + path);
    out << j.dump(2) << "\n";
}

inline ClusterReport read_report_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_report_file: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return report_from_json(j);
}

// Curve CSV: one row per grid level.
inline void write_curves_csv(std::ostream& out, const std::vector<LevelRecord>& curves) {
    out.precision(17);
    out << "k,s_hat,criterion\n";
    for (const auto& rec : curves)
        out << rec.k_requested << "," << rec.s_hat << "," << rec.criterion << "\n";
}

// ---- Reference fixtures -------------------------------------------------

inline nlohmann::json to_json(const ReferenceDistribution& ref) {
    nlohmann::json j;
    j["provenance"] = ref.provenance;
    j["seed"] = ref.seed;
    j["mc_kept"] = ref.mc_kept;
    j["mc_total"] = ref.mc_total;
    j["pstar"] = nlohmann::json::array();
    for (const auto& [c, p] : ref.pstar.entries)
        j["pstar"].push_back({{"cluster", c.indices()}, {"prob", p}});
    return j;
}

inline ReferenceDistribution reference_from_json(const nlohmann::json& j) {
    ReferenceDistribution ref;
    ref.provenance = j.at("provenance").get<std::string>();
    ref.seed = j.at("seed").get<std::uint64_t>();
    ref.mc_kept = j.at("mc_kept").get<long long>();
    ref.mc_total = j.at("mc_total").get<long long>();
    for (const auto& entry : j.at("pstar")) {
        const auto indices = entry.at("cluster").get<std::vector<int>>();
        ref.pstar.entries[Cluster::from_indices(indices)] = entry.at("prob").get<double>();
    }
    return ref;
}

inline void write_reference_file(const ReferenceDistribution& ref, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_reference_file: cannot open " + path);
    out << to_json(ref).dump(2) << "\n";
}

inline ReferenceDistribution read_reference_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_reference_file: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return reference_from_json(j);
}

// ---- Experiment reports -------------------------------------------------

inline nlohmann::json to_json(const ExperimentReport& rep) {
    nlohmann::json j;
    j["summaries"] = nlohmann::json::array();
    for (const auto& s : rep.summaries) {
        j["summaries"].push_back({{"config_index", s.config_index},
                                  {"rho", s.rho},
                                  {"alpha", s.alpha},
                                  {"n_ok", s.n_ok},
                                  {"n_failed", s.n_failed},
                                  {"hellinger_mean", s.hellinger_mean},
                                  {"hellinger_std", s.hellinger_std},
                                  {"recovery_mean", s.recovery_mean}});
    }
    j["replications"] = nlohmann::json::array();
    for (const auto& r : rep.records) {
        nlohmann::json rec = {{"config_index", r.config_index},
                              {"replication", r.replication},
                              {"ok", r.ok},
                              {"k_hat", r.k_hat},
                              {"s_hat", r.s_hat},
                              {"hellinger", r.hellinger},
                              {"recovery", r.recovery}};
        if (!r.ok) rec["error"] = r.error;
        rec["clusters"] = nlohmann::json::array();
        for (const auto& c : r.clusters) rec["clusters"].push_back(c.indices());
        j["replications"].push_back(rec);
    }
    return j;
}

inline void write_experiment_report_file(const ExperimentReport& rep, const std::string& path) {
    nlohmann::json j = to_json(rep);
    j["meta"] = {{"created", iso8601_now()}, {"wall_ms_total", rep.wall_ms_total}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_experiment_report_file: cannot open " + path);
    out << j.dump(2) << "\n";
}

// Raw curves: one row per (config, replication, k).
inline void write_experiment_curves_csv(std::ostream& out, const ExperimentReport& rep) {
    out.precision(17);
    out << "config_index,replication,k,s_hat,criterion\n";
    for (const auto& r : rep.records) {
        for (const auto& rec : r.curves)
            out << r.config_index << "," << r.replication << "," << rec.k_requested << ","
                << rec.s_hat << "," << rec.criterion << "\n";
    }
}

}  // namespace muscle
