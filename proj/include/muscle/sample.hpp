#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace muscle {

// Row-major n x d matrix of observations.
struct Sample {
    std::vector<double> values;
    long long n = 0;
    int d = 0;

    static Sample zeros(long long n, int d) {
        Sample s;
        s.n = n;
        s.d = d;
        s.values.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(d), 0.0);
        return s;
    }

    double& at(long long i, int j) {
        return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) +
                      static_cast<std::size_t>(j)];
    }

    double at(long long i, int j) const {
        return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) +
                      static_cast<std::size_t>(j)];
    }

    std::span<const double> row(long long i) const {
        return {values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(d),
                static_cast<std::size_t>(d)};
    }

    bool valid_shape() const {
        return n >= 1 && d >= 1 &&
               values.size() == static_cast<std::size_t>(n) * static_cast<std::size_t>(d);
    }
};

inline void check_sample(const Sample& s) {
    if (!s.valid_shape()) throw std::invalid_argument("sample: inconsistent shape");
}

inline std::vector<double> l1_norms(const Sample& s) {
    check_sample(s);
    std::vector<double> norms(static_cast<std::size_t>(s.n));
    for (long long i = 0; i < s.n; ++i) {
        double acc = 0.0;
        for (double x : s.row(i)) acc += x;
        norms[static_cast<std::size_t>(i)] = acc;
    }
    return norms;
}

// Componentwise power x -> x^alpha; standardizes the tail index without
// changing which coordinate groups are jointly large.
inline Sample power_transform(const Sample& s, double alpha) {
    check_sample(s);
    if (!(alpha > 0.0)) throw std::invalid_argument("power_transform: alpha must be positive");
    Sample out = s;
    if (alpha == 1.0) return out;
    for (double& x : out.values) x = std::pow(x, alpha);
    return out;
}

inline Sample abs_values(const Sample& s) {
    check_sample(s);
    Sample out = s;
    for (double& x : out.values) x = std::abs(x);
    return out;
}

}  // namespace muscle
