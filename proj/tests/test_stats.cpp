#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "support.hpp"

using namespace pcr;

TEST(IncompleteBeta, ClosedForms) {
    for (double x : {0.0, 0.01, 0.2, 0.5, 0.73, 0.99, 1.0}) {
        EXPECT_NEAR(regularized_incomplete_beta(1, 1, x), x, 1e-14);
        EXPECT_NEAR(regularized_incomplete_beta(3, 1, x), x * x * x, 1e-14);
        EXPECT_NEAR(regularized_incomplete_beta(1, 4, x), 1 - std::pow(1 - x, 4), 1e-14);
    }
    for (double a : {0.5, 2.0, 7.5, 40.0}) {
        EXPECT_NEAR(regularized_incomplete_beta(a, a, 0.5), 0.5, 1e-13);
    }
}

TEST(IncompleteBeta, DomainErrors) {
    EXPECT_THROW(regularized_incomplete_beta(0, 1, 0.5), ConfigError);
    EXPECT_THROW(regularized_incomplete_beta(1, 1, 1.5), ConfigError);
}

TEST(StudentT, ClosedFormsForOneAndTwoDf) {
    for (double t : {-30.0, -2.0, -0.3, 0.0, 0.7, 4.0}) {
        EXPECT_NEAR(student_t_cdf(t, 1), 0.5 + std::atan(t) / std::numbers::pi, 1e-13);
        EXPECT_NEAR(student_t_cdf(t, 2), 0.5 + t / (2 * std::sqrt(2 + t * t)), 1e-13);
    }
}

TEST(StudentT, StandardQuantiles) {
    // Table values of t_{0.975, df}.
    const std::vector<std::pair<double, double>> table{{29, 2.045}, {10, 2.228}, {5, 2.571}, {60, 2.000}, {1, 12.706}};
    for (const auto& [df, q] : table) {
        EXPECT_NEAR(student_t_cdf(q, df), 0.975, 1e-3) << df;
    }
    EXPECT_NEAR(student_t_cdf(2.045229642, 29), 0.975, 1e-6);
}

TEST(StudentT, TailsAndInfinities) {
    EXPECT_EQ(student_t_cdf(INFINITY, 5), 1.0);
    EXPECT_EQ(student_t_cdf(-INFINITY, 5), 0.0);
    EXPECT_EQ(student_t_two_tailed_p(0, 5), 1.0);
    EXPECT_EQ(student_t_two_tailed_p(INFINITY, 5), 0.0);
    EXPECT_THROW(student_t_cdf(1, 0), ConfigError);
}

TEST(StudentT, MatchesIntegrationOracle) {
    for (double df : {1.0, 2.0, 3.0, 7.0, 29.0, 120.0}) {
        for (double t : {0.01, 0.5, 1.0, 1.76, 2.045, 2.52, 4.0, 8.0}) {
            EXPECT_NEAR(student_t_two_tailed_p(t, df), oracle::t_two_tailed_p(t, df), 1e-9) << t << " " << df;
        }
    }
}

TEST(PairedTTest, ZeroMeanDiffs) {
    const std::vector<double> d{-1, 1};
    const auto r = paired_ttest(d);
    EXPECT_EQ(r.t_statistic, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_EQ(r.cohens_d, 0.0);
    EXPECT_EQ(r.df, 1.0);
}

TEST(PairedTTest, DegenerateVariance) {
    for (const std::vector<double>& d : {std::vector<double>{0, 0, 0}, std::vector<double>{0.25, 0.25, 0.25, 0.25}}) {
        try {
            paired_ttest(d);
            FAIL();
        } catch (const DegenerateVarianceError& e) {
            EXPECT_EQ(e.mean_diff(), d[0]);
        }
    }
    EXPECT_THROW(paired_ttest(std::vector<double>{1.0}), EmptyInputError);
}

TEST(PairedTTest, HandComputed) {
    // diffs 1, 2, 3, 4: mean 2.5, sample sd sqrt(5/3), t = 2.5 / (sd / 2).
    const std::vector<double> d{1, 2, 3, 4};
    const auto r = paired_ttest(d);
    const double sd = std::sqrt(5.0 / 3.0);
    EXPECT_NEAR(r.mean_diff, 2.5, 1e-15);
    EXPECT_NEAR(r.sd, sd, 1e-15);
    EXPECT_NEAR(r.t_statistic, 2.5 / (sd / 2.0), 1e-12);
    EXPECT_NEAR(r.cohens_d, 2.5 / sd, 1e-12);
    EXPECT_NEAR(r.p_value, oracle::t_two_tailed_p(r.t_statistic, 3), 1e-9);
}

TEST(PairedTTest, PublishedPairsConsistent) {
    // With n = 30 the effect size is t / sqrt(30).
    const double n = 30;
    EXPECT_EQ(std::round(-2.52 / std::sqrt(n) * 100) / 100, -0.46);
    EXPECT_EQ(std::round(-1.76 / std::sqrt(n) * 100) / 100, -0.32);
    const double p = student_t_two_tailed_p(-2.52, 29);
    EXPECT_GE(p, 0.015);
    EXPECT_LE(p, 0.020);
    EXPECT_EQ(significance_label(p), "Yes");
    EXPECT_EQ(significance_label(student_t_two_tailed_p(-1.76, 29)), "Marginal");
}

TEST(PairedTTest, SignificanceLabels) {
    EXPECT_EQ(significance_label(0.049), "Yes");
    EXPECT_EQ(significance_label(0.05), "Marginal");
    EXPECT_EQ(significance_label(0.099), "Marginal");
    EXPECT_EQ(significance_label(0.10), "No");
}

TEST(PairedTTestProperty, EffectSizeIdentitySymmetryAndOracle) {
    oracle::Rng rng(60);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.below(60);
        const double shift = rng.uniform(-1, 1);
        std::vector<double> d(n);
        for (double& x : d) x = shift + rng.normal() * rng.uniform(0.1, 2);
        const auto r = paired_ttest(d);
        ASSERT_NEAR(r.cohens_d, r.t_statistic / std::sqrt(static_cast<double>(n)), 1e-12);
        ASSERT_TRUE(r.p_value >= 0 && r.p_value <= 1);
        ASSERT_NEAR(r.p_value, oracle::t_two_tailed_p(r.t_statistic, r.df), 1e-6);

        std::vector<double> neg(d);
        for (double& x : neg) x = -x;
        const auto rn = paired_ttest(neg);
        ASSERT_NEAR(rn.t_statistic, -r.t_statistic, 1e-12);
        ASSERT_NEAR(rn.cohens_d, -r.cohens_d, 1e-12);
        ASSERT_NEAR(rn.p_value, r.p_value, 1e-14);
    }
}

TEST(ComparePaired, DegenerateKeepsMeanDiff) {
    const std::vector<double> a{1, 1, 1}, b{0.5, 0.5, 0.5};
    const auto c = compare_paired("pcr", "vector", "relevance@10", a, b);
    EXPECT_FALSE(c.test.has_value());
    EXPECT_DOUBLE_EQ(c.mean_diff, 0.5);
    EXPECT_EQ(to_json(c)["significant"], "degenerate");
    EXPECT_NE(render_comparison_table({c}).find("degenerate"), std::string::npos);
    EXPECT_THROW(compare_paired("a", "b", "m", a, std::vector<double>{1}), ConfigError);
}

TEST(ComparePaired, JsonFields) {
    const std::vector<double> a{1, 0.5, 0.2, 0.9}, b{0.4, 0.5, 0.1, 0.3};
    const auto c = compare_paired("pcr", "bm25", "relevance@10", a, b);
    ASSERT_TRUE(c.test.has_value());
    const auto j = to_json(c);
    EXPECT_EQ(j["n"], 4);
    EXPECT_DOUBLE_EQ(j["t_statistic"].get<double>(), c.test->t_statistic);
    EXPECT_EQ(j["significant"], significance_label(c.test->p_value));
}
