#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "muscle/chi_square.hpp"
#include "muscle/score_test.hpp"
#include "support.hpp"

using namespace muscle;

TEST_CASE("chi-square upper tail matches reference values") {
    REQUIRE(chi2_upper_tail(0.0, 1) == 1.0);
    REQUIRE(chi2_upper_tail(0.0, 7) == 1.0);
    REQUIRE(chi2_upper_tail(3.841459, 1) == Catch::Approx(0.05).margin(1e-6));
    REQUIRE(chi2_upper_tail(1.0, 2) == Catch::Approx(std::exp(-0.5)).margin(1e-10));
    // dof = 2 has the closed form exp(-x/2) across the whole range.
    for (double x : {0.1, 0.7, 2.0, 5.0, 11.0, 30.0})
        REQUIRE(chi2_upper_tail(x, 2) == Catch::Approx(std::exp(-0.5 * x)).margin(1e-10));
    REQUIRE_THROWS_AS(chi2_upper_tail(1.0, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(chi2_upper_tail(-1.0, 1), std::invalid_argument);
}

TEST_CASE("chi-square quantile inverts the upper tail") {
    REQUIRE(chi2_quantile(std::exp(-0.5), 2) == Catch::Approx(1.0).margin(1e-8));
    REQUIRE(chi2_quantile(0.05, 1) == Catch::Approx(3.841459).margin(1e-5));
    for (int dof : {1, 2, 5, 17}) {
        for (double p : {0.995, 0.6, 0.3, 0.05, 0.001}) {
            REQUIRE(chi2_upper_tail(chi2_quantile(p, dof), dof) == Catch::Approx(p).margin(1e-7));
        }
    }
    REQUIRE_THROWS_AS(chi2_quantile(0.0, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(chi2_quantile(1.0, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(chi2_quantile(0.5, 0), std::invalid_argument);
}

TEST_CASE("score statistic is zero for equal counts") {
    const long long values[] = {8, 8, 8};
    const auto cc = testing::counts_from_values(values);
    const auto res = score_test(cc, 0, 3, 0.05);
    REQUIRE(res.statistic == Catch::Approx(0.0).margin(1e-12));
    REQUIRE_FALSE(res.reject);
    REQUIRE(res.p_value == 1.0);
}

TEST_CASE("score statistic matches the hand-evaluated block") {
    // Counts (10, 6, 8) at k = 100: rho = 0.08, statistic 1.0, dof 2.
    std::vector<long long> values{10, 6, 8};
    long long filler = 100 - 24;
    values.push_back(filler);  // bulk cluster so that k = 100
    std::sort(values.begin(), values.end(), std::greater<long long>());
    const auto cc = testing::counts_from_values(values);
    REQUIRE(cc.level == 100);
    const auto res = score_test(cc, 1, 4, 0.05);
    REQUIRE(res.rho_hat == Catch::Approx(0.08).margin(1e-12));
    REQUIRE(res.statistic == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(res.dof == 2);
    REQUIRE_FALSE(res.reject);
}

TEST_CASE("score test validates its block bounds") {
    const long long values[] = {9, 7, 5};
    const auto cc = testing::counts_from_values(values);
    REQUIRE_THROWS_AS(score_test(cc, -1, 2, 0.05), std::invalid_argument);
    REQUIRE_THROWS_AS(score_test(cc, 2, 2, 0.05), std::invalid_argument);
    REQUIRE_THROWS_AS(score_test(cc, 0, 4, 0.05), std::invalid_argument);
    REQUIRE_THROWS_AS(score_test(cc, 1, 2, 0.05), std::invalid_argument);  // dof would be 0
    REQUIRE_THROWS_AS(score_test(cc, 0, 3, 0.0), std::invalid_argument);
}

TEST_CASE("score statistic ignores the order within the tested block") {
    std::vector<long long> a{40, 12, 9, 11, 3};
    std::vector<long long> b{40, 11, 9, 12, 3};  // permuted block
    const auto ra = score_test(testing::counts_from_values(a), 1, 4, 0.05);
    const auto rb = score_test(testing::counts_from_values(b), 1, 4, 0.05);
    REQUIRE(ra.statistic == Catch::Approx(rb.statistic).margin(1e-12));
}

TEST_CASE("score statistic is positive iff block counts differ") {
    std::vector<long long> equal{30, 6, 6, 6, 2};
    REQUIRE(score_test(testing::counts_from_values(equal), 1, 4, 0.05).statistic == 0.0);
    std::vector<long long> distinct{30, 7, 6, 5, 2};
    REQUIRE(score_test(testing::counts_from_values(distinct), 1, 4, 0.05).statistic > 0.0);
}

TEST_CASE("score test holds its level under the null") {
    // Three distinct leading probabilities, an equal block of three, and a
    // spread of small bulk categories; k = 5000 puts the block well inside
    // the asymptotic regime.
    std::vector<double> probs{0.30, 0.20, 0.15, 0.07, 0.07, 0.07};
    for (int i = 0; i < 7; ++i) probs.push_back(0.02);

    Rng rng(4242);
    const long long k = 5000;
    int rejections = 0;
    std::vector<double> stats;
    const int reps = 2000;
    for (int rep = 0; rep < reps; ++rep) {
        const auto counts = testing::multinomial(rng, k, probs);
        const auto cc = testing::counts_from_values(counts);
        const auto res = score_test(cc, 3, 6, 0.05);
        stats.push_back(res.statistic);
        if (res.reject) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / reps;
    REQUIRE(rate > 0.03);
    REQUIRE(rate < 0.08);

    std::sort(stats.begin(), stats.end());
    const double q95 = stats[static_cast<std::size_t>(0.95 * reps)];
    const double expected = chi2_quantile(0.05, 2);
    REQUIRE(q95 > 0.9 * expected);
    REQUIRE(q95 < 1.1 * expected);
}

TEST_CASE("grouped statistic follows its chi-square limit") {
    // Pooling ranks 4..6 against the true probabilities: the statistic has
    // s1 + 1 = 4 degrees of freedom in the limit. Counts come from the
    // bulk-augmented multinomial of the extreme regime (n >> k), where the
    // cluster cells are independent Poissons with mean k p_j.
    std::vector<double> probs{0.30, 0.20, 0.15, 0.07, 0.07, 0.07};

    Rng rng(90210);
    const long long k = 5000;
    const int reps = 2000;
    std::vector<double> stats;
    double mean = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<long long> counts;
        for (double p : probs) counts.push_back(testing::poisson(rng, static_cast<double>(k) * p));
        const double s = testing::grouped_statistic(counts, probs, k, 3, 6);
        stats.push_back(s);
        mean += s;
    }
    mean /= reps;
    REQUIRE(mean > 0.85 * 4.0);
    REQUIRE(mean < 1.15 * 4.0);

    std::sort(stats.begin(), stats.end());
    const double q95 = stats[static_cast<std::size_t>(0.95 * reps)];
    const double expected = chi2_quantile(0.05, 4);
    REQUIRE(q95 > 0.9 * expected);
    REQUIRE(q95 < 1.1 * expected);
}
