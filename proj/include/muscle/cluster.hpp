#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace muscle {

// A set of coordinate indices (0-based), stored as a bitset. Only observed
// clusters are ever materialized, so the 2^d - 1 universe never exists in
// memory; maps keyed by Cluster stay proportional to the data.
class Cluster {
public:
    Cluster() = default;

    static Cluster from_indices(std::span<const int> indices) {
        Cluster c;
        for (int i : indices) c.add(i);
        return c;
    }

    static Cluster from_indices(std::initializer_list<int> indices) {
        return from_indices(std::span<const int>(indices.begin(), indices.size()));
    }

    static Cluster singleton(int i) {
        Cluster c;
        c.add(i);
        return c;
    }

    static Cluster full(int dim) {
        Cluster c;
        for (int i = 0; i < dim; ++i) c.add(i);
        return c;
    }

    void add(int i) {
        if (i < 0) throw std::invalid_argument("Cluster: negative index");
        const std::size_t w = static_cast<std::size_t>(i) / 64;
        if (w >= words_.size()) words_.resize(w + 1, 0);
        words_[w] |= (1ull << (static_cast<std::size_t>(i) % 64));
    }

    bool contains(int i) const {
        if (i < 0) return false;
        const std::size_t w = static_cast<std::size_t>(i) / 64;
        if (w >= words_.size()) return false;
        return (words_[w] >> (static_cast<std::size_t>(i) % 64)) & 1ull;
    }

    int size() const {
        int n = 0;
        for (std::uint64_t w : words_) n += std::popcount(w);
        return n;
    }

    bool empty() const {
        for (std::uint64_t w : words_)
            if (w) return false;
        return true;
    }

    std::vector<int> indices() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                const int b = std::countr_zero(bits);
                out.push_back(static_cast<int>(w * 64) + b);
                bits &= bits - 1;
            }
        }
        return out;
    }

    bool subset_of(const Cluster& o) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            const std::uint64_t other = w < o.words_.size() ? o.words_[w] : 0;
            if (words_[w] & ~other) return false;
        }
        return true;
    }

    bool proper_subset_of(const Cluster& o) const {
        return subset_of(o) && !(*this == o);
    }

    friend Cluster operator|(const Cluster& a, const Cluster& b) {
        Cluster c = a.words_.size() >= b.words_.size() ? a : b;
        const Cluster& small = a.words_.size() >= b.words_.size() ? b : a;
        for (std::size_t w = 0; w < small.words_.size(); ++w) c.words_[w] |= small.words_[w];
        return c;
    }

    bool operator==(const Cluster& o) const {
        const std::size_t n = std::max(words_.size(), o.words_.size());
        for (std::size_t w = 0; w < n; ++w) {
            const std::uint64_t a = w < words_.size() ? words_[w] : 0;
            const std::uint64_t b = w < o.words_.size() ? o.words_[w] : 0;
            if (a != b) return false;
        }
        return true;
    }

    // Lexicographic order on the sorted index sequences, e.g. {0} < {0,1} < {1}.
    bool operator<(const Cluster& o) const {
        const auto a = indices();
        const auto b = o.indices();
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }

    std::size_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (std::uint64_t w : words_) {
            if (!w) continue;  // trailing/interior zero words must not affect the hash
            h ^= w + 0x100000001b3ull + (h << 6) + (h >> 2);
            h *= 0x100000001b3ull;
        }
        return static_cast<std::size_t>(h);
    }

private:
    std::vector<std::uint64_t> words_;
};

struct ClusterHash {
    std::size_t operator()(const Cluster& c) const { return c.hash(); }
};

// Probability vector over clusters; absent clusters carry mass zero.
struct ProbabilityVector {
    std::map<Cluster, double> entries;

    double total() const {
        double s = 0.0;
        for (const auto& [c, p] : entries) s += p;
        return s;
    }

    double at(const Cluster& c) const {
        const auto it = entries.find(c);
        return it == entries.end() ? 0.0 : it->second;
    }
};

}  // namespace muscle
