#pragma once

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "muscle/sample.hpp"

namespace muscle {

enum class HeaderPolicy { Auto, Header, NoHeader };

struct Dataset {
    Sample sample;
    std::vector<std::string> columns;
    long long dropped_rows = 0;  // rows removed because of missing cells
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool is_missing_token(const std::string& t) {
    if (t.empty()) return true;
    std::string lower;
    for (char c : t) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return lower == "na" || lower == "nan" || lower == "null";
}

// strtod-free strict parse; returns false for anything but a full numeric token.
inline bool parse_number(const std::string& t, double& out) {
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    if (begin != end && *begin == '+') ++begin;
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace detail

inline Dataset load_csv(std::istream& in, HeaderPolicy policy = HeaderPolicy::Auto) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        rows.push_back(detail::split_csv_line(line));
    }
    if (rows.empty()) throw std::invalid_argument("load_csv: empty file");

    Dataset ds;
    std::size_t first_data = 0;
    bool header = policy == HeaderPolicy::Header;
    if (policy == HeaderPolicy::Auto) {
        for (const auto& cell : rows[0]) {
            double ignored;
            if (!detail::is_missing_token(cell) && !detail::parse_number(cell, ignored)) {
                header = true;
                break;
            }
        }
    }
    const std::size_t width = rows[0].size();
    if (header) {
        ds.columns.assign(rows[0].begin(), rows[0].end());
        first_data = 1;
        if (rows.size() == 1) throw std::invalid_argument("load_csv: header but no data rows");
    } else {
        for (std::size_t j = 0; j < width; ++j) ds.columns.push_back("c" + std::to_string(j));
    }

    std::vector<double> parsed(width);
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        if (rows[r].size() != width)
            throw std::invalid_argument("load_csv: ragged row at line " + std::to_string(r + 1));
        bool missing = false;
        for (std::size_t j = 0; j < width; ++j) {
            const auto& cell = rows[r][j];
            if (detail::is_missing_token(cell)) {
                missing = true;
                continue;
            }
            if (!detail::parse_number(cell, parsed[j]))
                throw std::invalid_argument("load_csv: non-numeric cell '" + cell + "' at line " +
                                            std::to_string(r + 1));
        }
        if (missing) {
            ++ds.dropped_rows;
            continue;
        }
        ds.sample.values.insert(ds.sample.values.end(), parsed.begin(), parsed.end());
        ++ds.sample.n;
    }
    ds.sample.d = static_cast<int>(width);
    if (ds.sample.n == 0) throw std::invalid_argument("load_csv: no complete data rows");
    return ds;
}

inline Dataset load_csv(const std::string& path, HeaderPolicy policy = HeaderPolicy::Auto) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);
    return load_csv(in, policy);
}

inline void save_csv(std::ostream& out, const Sample& sample,
                     const std::vector<std::string>& columns = {}) {
    check_sample(sample);
    out.precision(17);
    if (!columns.empty()) {
        for (int j = 0; j < sample.d; ++j) out << (j ? "," : "") << columns[static_cast<std::size_t>(j)];
        out << "\n";
    }
    for (long long i = 0; i < sample.n; ++i) {
        for (int j = 0; j < sample.d; ++j) out << (j ? "," : "") << sample.at(i, j);
        out << "\n";
    }
}

inline void save_csv(const std::string& path, const Sample& sample,
                     const std::vector<std::string>& columns = {}) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot open " + path);
    save_csv(out, sample, columns);
}

}  // namespace muscle
