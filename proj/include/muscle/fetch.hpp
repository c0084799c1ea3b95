#pragma once

// Dataset retrieval: download, checksum pinning, format normalization and a
// local cache. Everything lands in the cache as a plain CSV that load_csv can
// read; downstream code never touches the raw upstream formats.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <openssl/evp.h>
#include <zlib.h>

#include <httplib.h>

#include "muscle/csv.hpp"

namespace muscle {

struct FetchOptions {
    std::string cache_dir;       // default: $MUSCLE_CACHE_DIR, else ~/.cache/muscle
    bool allow_network = false;  // downloads require explicit opt-in
    std::string sha256_override;
    std::string base_url_override;
};

struct FetchResult {
    std::string csv_path;
    bool from_cache = false;
    std::string sha256;
};

namespace detail {

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest failure");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

// Raw-deflate decompression of one zip entry.
inline std::string zlib_inflate_raw(const unsigned char* data, std::size_t size,
                                    std::size_t expected) {
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw std::runtime_error("zip: inflateInit failed");
    std::string out;
    out.resize(expected > 0 ? expected : size * 4 + 1024);
    zs.next_in = const_cast<unsigned char*>(data);
    zs.avail_in = static_cast<uInt>(size);
    std::size_t written = 0;
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        if (written == out.size()) out.resize(out.size() * 2);
        zs.next_out = reinterpret_cast<unsigned char*>(out.data()) + written;
        zs.avail_out = static_cast<uInt>(out.size() - written);
        rc = inflate(&zs, Z_NO_FLUSH);
        written = out.size() - zs.avail_out;
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw std::runtime_error("zip: inflate failed");
        }
    }
    inflateEnd(&zs);
    out.resize(written);
    return out;
}

inline std::uint32_t read_u32(const std::string& b, std::size_t off) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(b[off])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 3])) << 24;
}

inline std::uint16_t read_u16(const std::string& b, std::size_t off) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                      static_cast<unsigned char>(b[off + 1]) << 8);
}

// Extract the first entry of a zip archive (stored or deflated). The upstream
// archives hold exactly one CSV.
inline std::string unzip_first_entry(const std::string& zip) {
    if (zip.size() < 30 || zip.compare(0, 4, "PK\x03\x04") != 0)
        throw std::runtime_error("zip: not a zip archive");
    const std::uint16_t method = read_u16(zip, 8);
    const std::uint16_t flags = read_u16(zip, 6);
    std::uint32_t comp_size = read_u32(zip, 18);
    std::uint32_t uncomp_size = read_u32(zip, 22);
    const std::uint16_t name_len = read_u16(zip, 26);
    const std::uint16_t extra_len = read_u16(zip, 28);
    const std::size_t data_off = 30 + name_len + extra_len;

    if (flags & 0x8) {
        // Sizes live in the data descriptor; recover them from the central
        // directory instead.
        const auto cd = zip.rfind("PK\x01\x02");
        if (cd == std::string::npos || cd + 24 > zip.size())
            throw std::runtime_error("zip: missing central directory");
        comp_size = read_u32(zip, cd + 20);
        uncomp_size = read_u32(zip, cd + 24);
    }
    if (data_off + comp_size > zip.size()) throw std::runtime_error("zip: truncated archive");

    const auto* data = reinterpret_cast<const unsigned char*>(zip.data()) + data_off;
    if (method == 0) return zip.substr(data_off, comp_size);
    if (method == 8) return zlib_inflate_raw(data, comp_size, uncomp_size);
    throw std::runtime_error("zip: unsupported compression method");
}

inline std::string http_get(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw std::runtime_error("fetch: malformed url " + url);
    const auto host_end = url.find('/', scheme_end + 3);
    const std::string origin = host_end == std::string::npos ? url : url.substr(0, host_end);
    const std::string path = host_end == std::string::npos ? "/" : url.substr(host_end);

    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    const auto res = client.Get(path);
    if (!res) throw std::runtime_error("fetch: network failure for " + url);
    if (res->status != 200)
        throw std::runtime_error("fetch: HTTP " + std::to_string(res->status) + " for " + url);
    return res->body;
}

// Normalizers: upstream bytes -> (column names, csv body rows).

// Daily-average wind speeds: whitespace-separated year, month, day and twelve
// station columns.
inline std::string normalize_wind(const std::string& raw) {
    static const std::vector<std::string> stations = {"RPT", "VAL", "ROS", "KIL", "SHA", "BIR",
                                                      "DUB", "CLA", "MUL", "CLO", "BEL", "MAL"};
    std::ostringstream out;
    for (std::size_t i = 0; i < stations.size(); ++i) out << (i ? "," : "") << stations[i];
    out << "\n";
    std::istringstream in(raw);
    std::string line;
    long long rows = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        double year, month, day;
        if (!(ls >> year >> month >> day)) continue;
        std::vector<double> v(12);
        bool ok = true;
        for (int j = 0; j < 12; ++j)
            if (!(ls >> v[static_cast<std::size_t>(j)])) {
                ok = false;
                break;
            }
        if (!ok) continue;
        out.precision(17);
        for (int j = 0; j < 12; ++j) out << (j ? "," : "") << v[static_cast<std::size_t>(j)];
        out << "\n";
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("wind-speed: no parsable rows");
    return out.str();
}

// Daily industry-portfolio returns: take the leading value-weighted section
// of the CSV inside the zip, restricted to 1970-2019; -99.99 marks a missing
// value and is forwarded as NA.
inline std::string normalize_industry(const std::string& zip_bytes) {
    const std::string csv = unzip_first_entry(zip_bytes);
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> names;
    std::ostringstream out;
    long long rows = 0;
    bool in_table = false;
    while (std::getline(in, line)) {
        const std::string t = muscle::detail::trim(line);
        if (!in_table) {
            // The header row of the first table starts with an empty date cell.
            if (!t.empty() && t[0] == ',') {
                const auto cells = muscle::detail::split_csv_line(line);
                names.assign(cells.begin() + 1, cells.end());
                for (std::size_t i = 0; i < names.size(); ++i)
                    out << (i ? "," : "") << muscle::detail::trim(names[i]);
                out << "\n";
                in_table = true;
            }
            continue;
        }
        if (t.empty()) break;  // end of the first (value-weighted) table
        const auto cells = muscle::detail::split_csv_line(line);
        if (cells.size() != names.size() + 1) break;
        double date;
        if (!muscle::detail::parse_number(cells[0], date)) break;
        if (date < 19700101 || date > 20191231) continue;
        for (std::size_t j = 1; j < cells.size(); ++j) {
            double v;
            const bool numeric = muscle::detail::parse_number(cells[j], v);
            if (!numeric || v <= -99.0) {
                out << (j > 1 ? "," : "") << "NA";
            } else {
                out << (j > 1 ? "," : "") << cells[j];
            }
        }
        out << "\n";
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("industry-portfolios: no rows in 1970-2019");
    return out.str();
}

struct DatasetInfo {
    std::string name;
    std::string url;
    std::string pinned_sha256;  // empty: pin on first fetch
    std::function<std::string(const std::string&)> normalize;
};

inline const std::vector<DatasetInfo>& dataset_registry() {
    // Upstream digests are pinned on first successful fetch (stored next to
    // the cache entry) or supplied explicitly; later fetches verify them.
    static const std::vector<DatasetInfo> registry = {
        {"wind-speed", "http://lib.stat.cmu.edu/datasets/wind.data", "", &normalize_wind},
        {"industry-portfolios",
         "https://mba.tuck.dartmouth.edu/pages/faculty/ken.french/ftp/"
         "49_Industry_Portfolios_Daily_CSV.zip",
         "", &normalize_industry},
    };
    return registry;
}

inline std::string default_cache_dir() {
    if (const char* env = std::getenv("MUSCLE_CACHE_DIR")) return env;
    if (const char* home = std::getenv("HOME"))
        return std::string(home) + "/.cache/muscle";
    return ".muscle-cache";
}

}  // namespace detail

// Resolve a dataset to a normalized CSV in the cache. A cached copy is used
// without touching the network; otherwise the raw file is downloaded,
// verified against the pinned checksum (hard error naming expected and
// actual on mismatch), normalized and cached.
inline FetchResult fetch_dataset(const std::string& name, const FetchOptions& options = {}) {
    const detail::DatasetInfo* info = nullptr;
    for (const auto& d : detail::dataset_registry())
        if (d.name == name) info = &d;
    if (!info) throw std::invalid_argument("fetch_dataset: unknown dataset '" + name + "'");

    namespace fs = std::filesystem;
    const fs::path cache =
        fs::path(options.cache_dir.empty() ? detail::default_cache_dir() : options.cache_dir);
    fs::create_directories(cache);
    const fs::path csv_path = cache / (name + ".csv");
    const fs::path pin_path = cache / (name + ".sha256");

    FetchResult result;
    result.csv_path = csv_path.string();
    if (fs::exists(csv_path)) {
        result.from_cache = true;
        if (fs::exists(pin_path)) {
            std::ifstream pin(pin_path);
            pin >> result.sha256;
        }
        return result;
    }

    if (!options.allow_network)
        throw std::runtime_error("fetch_dataset: '" + name +
                                 "' is not cached and network fetch was not requested");

    const std::string url = options.base_url_override.empty()
                                ? info->url
                                : options.base_url_override + "/" + name;
    const std::string raw = detail::http_get(url);
    const std::string actual = detail::sha256_hex(raw);

    std::string expected = options.sha256_override.empty() ? info->pinned_sha256
                                                           : options.sha256_override;
    if (expected.empty() && fs::exists(pin_path)) {
        std::ifstream pin(pin_path);
        pin >> expected;
    }
    if (!expected.empty() && expected != actual)
        throw std::runtime_error("fetch_dataset: checksum mismatch for '" + name +
                                 "' (expected " + expected + ", actual " + actual + ")");

    const std::string csv = info->normalize(raw);
    {
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("fetch_dataset: cannot write " + csv_path.string());
        out << csv;
    }
    {
        std::ofstream pin(pin_path);
        pin << actual << "\n";
    }
    result.sha256 = actual;
    return result;
}

}  // namespace muscle
