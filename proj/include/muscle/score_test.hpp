#pragma once

#include <stdexcept>

#include "muscle/chi_square.hpp"
#include "muscle/tail.hpp"

namespace muscle {

struct ScoreTestResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool reject = false;
    double rho_hat = 0.0;
};

// Score test of equal occurrence probability across the count block at sorted
// ranks s1+1..s2; the statistic is asymptotically chi-square with s2-s1-1
// degrees of freedom.
inline ScoreTestResult score_test(const ClusterCounts& cc, int s1, int s2, double level) {
    const long long r = cc.distinct();
    if (s1 < 0 || s2 <= s1 || s2 > r) throw std::invalid_argument("score_test: need 0 <= s1 < s2 <= r");
    if (s2 - s1 < 2) throw std::invalid_argument("score_test: block must contain at least two clusters");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("score_test: level must lie in (0,1)");

    const auto sorted = cc.sorted_desc();
    const double k = static_cast<double>(cc.level);
    const int block = s2 - s1;

    double block_sum = 0.0;
    for (int j = s1; j < s2; ++j) block_sum += static_cast<double>(sorted[static_cast<std::size_t>(j)].second);
    const double rho_hat = block_sum / (k * static_cast<double>(block));
    if (!(rho_hat > 0.0)) throw std::domain_error("score_test: tested block has zero mass");

    double stat = 0.0;
    for (int j = s1; j < s2; ++j) {
        const double dev = static_cast<double>(sorted[static_cast<std::size_t>(j)].second) / k - rho_hat;
        stat += dev * dev;
    }
    stat *= k / rho_hat;

    ScoreTestResult res;
    res.statistic = stat;
    res.dof = block - 1;
    res.p_value = chi2_upper_tail(stat, res.dof);
    res.reject = stat > chi2_quantile(level, res.dof);
    res.rho_hat = rho_hat;
    return res;
}

}  // namespace muscle
