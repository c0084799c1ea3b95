#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "muscle/cluster.hpp"
#include "muscle/rng.hpp"

namespace muscle {

// A point of the scaled simplex {w >= 0 : sum w_i = scale}.
struct SimplexPoint {
    std::vector<double> values;
    double scale = 1.0;
};

namespace detail {

inline void check_projection_input(std::span<const double> v, double z) {
    if (v.empty()) throw std::invalid_argument("project: empty vector");
    if (!(z > 0.0)) throw std::invalid_argument("project: scale must be positive");
    for (double x : v)
        if (x < 0.0) throw std::invalid_argument("project: negative entry");
}

// Given the support of the minimizer, the shift is
// eta = (sum of the supported entries - z) / |support|. Both search
// strategies below finish with this same pass, carried in double-double
// arithmetic: with entries of magnitude ~1e6 a plain double eta is only
// accurate to ~eps * sum, which already breaks the 1e-12 feasibility and
// idempotence guarantees.
inline SimplexPoint finish_projection(std::span<const double> v, double z, double eta0) {
    double hi = 0.0, lo = 0.0;
    long long m = 0;
    for (double x : v) {
        if (x > eta0) {
            const double s = hi + x;
            const double bp = s - hi;
            lo += (hi - (s - bp)) + (x - bp);
            hi = s;
            ++m;
        }
    }

    double eta1 = eta0, eta2 = 0.0;
    if (m > 0) {
        const double s = hi - z;
        const double bp = s - hi;
        lo += (hi - (s - bp)) + (-z - bp);
        const double md = static_cast<double>(m);
        eta1 = s / md;
        eta2 = ((s - eta1 * md) + lo) / md;
    }

    SimplexPoint w;
    w.scale = z;
    w.values.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        w.values[i] = std::max((v[i] - eta1) - eta2, 0.0);
    return w;
}

}  // namespace detail

// Euclidean projection of a nonnegative vector onto {w >= 0 : sum w_i = z},
// by randomized pivot partitioning (expected linear time). The output is the
// unique minimizer w_i = max(v_i - eta, 0); pivot choices only affect the
// partition order, never the result.
inline SimplexPoint project(std::span<const double> v, double z, Rng& rng) {
    detail::check_projection_input(v, z);

    std::vector<std::size_t> active(v.size());
    std::iota(active.begin(), active.end(), std::size_t{0});

    double s = 0.0;       // sum of entries known to lie above eta
    long long rho = 0;    // number of such entries
    std::size_t lo = 0, hi = active.size();

    while (lo < hi) {
        const std::size_t pivot_pos = lo + static_cast<std::size_t>(rng.below(hi - lo));
        const double pivot = v[active[pivot_pos]];

        // Partition the active range into [lo, mid) >= pivot and [mid, hi) < pivot.
        std::swap(active[pivot_pos], active[hi - 1]);
        std::size_t mid = lo;
        for (std::size_t i = lo; i + 1 < hi; ++i) {
            if (v[active[i]] >= pivot) std::swap(active[i], active[mid++]);
        }
        std::swap(active[mid], active[hi - 1]);
        ++mid;

        double delta_s = 0.0;
        for (std::size_t i = lo; i < mid; ++i) delta_s += v[active[i]];
        const long long delta_rho = static_cast<long long>(mid - lo);

        if ((s + delta_s) - static_cast<double>(rho + delta_rho) * pivot < z) {
            s += delta_s;
            rho += delta_rho;
            lo = mid;
        } else {
            hi = mid - 1;  // drop the pivot itself, keep the strictly larger part
        }
    }

    // rho >= 1: the largest entry always satisfies the acceptance test.
    const double eta = (s - z) / static_cast<double>(rho);
    return detail::finish_projection(v, z, eta);
}

inline SimplexPoint project(std::span<const double> v, double z) {
    Rng rng(0x70726f6a65637421ull);
    return project(v, z, rng);
}

// Deterministic O(d log d) reference: sort descending and locate the largest
// prefix whose running average keeps every prefix entry positive after the
// shift. Shares the projection contract with project() and serves as its
// test oracle.
inline SimplexPoint project_oracle(std::span<const double> v, double z) {
    detail::check_projection_input(v, z);

    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());

    double prefix = 0.0;
    double eta = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        prefix += sorted[j];
        const double candidate = (prefix - z) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0) {
            eta = candidate;
        } else {
            break;
        }
    }
    return detail::finish_projection(v, z, eta);
}

// The support pattern of a simplex point: {i : w_i > tol * scale}. Clipped
// projections yield exact zeros, hence the zero default tolerance.
inline Cluster support_cluster(const SimplexPoint& w, double tol = 0.0) {
    Cluster c;
    const double cut = tol * w.scale;
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        if (w.values[i] > cut) c.add(static_cast<int>(i));
    }
    if (c.empty()) throw std::domain_error("support_cluster: all coordinates below tolerance");
    return c;
}

}  // namespace muscle
