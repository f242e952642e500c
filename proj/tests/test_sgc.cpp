#include <gtest/gtest.h>

#include <cmath>

#include "stpca/errors.hpp"
#include "stpca/sgc.hpp"
#include "stpca/stats.hpp"
#include "stpca/verify.hpp"

using namespace stpca;

TEST(Thresholds, SingleThresholdIsZero) {
    Rng rng(1);
    const ThresholdBank bank = generate_thresholds(10, 1, rng);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(bank.at(i, 0), 0.0);
}

TEST(Thresholds, RowsAreCentered) {
    Rng rng(2);
    for (std::size_t M : {2u, 7u, 50u, 633u}) {
        const ThresholdBank bank = generate_thresholds(13, M, rng);
        for (std::size_t i = 0; i < 13; ++i) {
            double s = 0.0;
            for (double z : bank.row(i)) s += z;
            EXPECT_NEAR(s, 0.0, 1e-9 * static_cast<double>(M));
        }
    }
}

TEST(Thresholds, VarianceIsBudgetMinusOne) {
    const std::size_t M = 50, rows = 20000;
    Rng rng(3);
    const ThresholdBank bank = generate_thresholds(rows, M, rng);
    for (std::size_t t : {0u, 17u, 49u}) {
        std::vector<double> col(rows);
        for (std::size_t i = 0; i < rows; ++i) col[i] = bank.at(i, t);
        EXPECT_NEAR(variance(col) / (M - 1.0), 1.0, 0.05);
    }
}

TEST(Thresholds, Deterministic) {
    Rng a(9, 3, StreamPurpose::Thresholds), b(9, 3, StreamPurpose::Thresholds);
    const ThresholdBank x = generate_thresholds(5, 20, a), y = generate_thresholds(5, 20, b);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t t = 0; t < 20; ++t) EXPECT_EQ(x.at(i, t), y.at(i, t));
}

TEST(Thresholds, CursorSemantics) {
    Rng rng(4);
    ThresholdBank bank = generate_thresholds(6, 4, rng);
    const auto first = bank.next_threshold(3);
    ASSERT_TRUE(first.has_value());
    EXPECT_EQ(*first, bank.at(3, 0));
    EXPECT_EQ(bank.cursor(3), 1u);
    for (std::size_t j = 0; j < 6; ++j)
        if (j != 3) EXPECT_EQ(bank.cursor(j), 0u);
    for (int c = 0; c < 3; ++c) EXPECT_TRUE(bank.next_threshold(3).has_value());
    EXPECT_TRUE(bank.exhausted(3));
    EXPECT_FALSE(bank.next_threshold(3).has_value());
    EXPECT_EQ(bank.cursor(3), 4u);
    EXPECT_FALSE(bank.exhausted(2));
    bank.reset_cursors();
    EXPECT_EQ(bank.cursor(3), 0u);
}

TEST(Thresholds, ZeroBank) {
    ThresholdBank bank = ThresholdBank::zeros(3, 5);
    for (int c = 0; c < 5; ++c) EXPECT_EQ(*bank.next_threshold(1), 0.0);
    EXPECT_FALSE(bank.next_threshold(1));
}

TEST(SgcStream, UnitBudgetReturnsBaseObservation) {
    const std::vector<double> mu{0.5, -1.0, 2.0};
    CloneSchedule sched{{{0, 2}, {1}}};
    Rng a(5), b(5);
    const auto out = sgc_stream(mu, sched, 1, a);
    ASSERT_EQ(out.size(), 2u);
    // With M = 1 every threshold is 0, so two independent single-visit
    // streams from the same seed agree with each other and with Y.
    const auto again = sgc_stream(mu, sched, 1, b);
    EXPECT_EQ(out[0].values, again[0].values);
    EXPECT_EQ(out[0].subset, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(out[1].subset, (std::vector<std::size_t>{1}));
}

TEST(SgcStream, UnitBudgetIsUnitGaussianAroundMean) {
    const std::vector<double> mu{3.0};
    CloneSchedule sched{{{0}}};
    std::vector<double> xs;
    for (std::uint64_t s = 0; s < 5000; ++s) {
        Rng rng(s);
        xs.push_back(sgc_stream(mu, sched, 1, rng)[0].values[0]);
    }
    EXPECT_NEAR(mean(xs), 3.0, 4.0 / std::sqrt(5000.0));
    EXPECT_NEAR(variance(xs), 1.0, 0.06);
}

TEST(SgcStream, StopsBeforeBudgetOverflow) {
    const std::vector<double> mu{0.0, 0.0};
    CloneSchedule sched;
    for (int t = 0; t < 10; ++t) sched.subsets.push_back({0, 1});
    sched.subsets.push_back({1});
    Rng rng(6);
    EXPECT_EQ(sgc_stream(mu, sched, 4, rng).size(), 4u);
}

TEST(SgcStream, RejectsBadSchedule) {
    const std::vector<double> mu{0.0, 0.0};
    Rng rng(7);
    EXPECT_ANY_THROW(sgc_stream(mu, CloneSchedule{{{}}}, 3, rng));
    EXPECT_ANY_THROW(sgc_stream(mu, CloneSchedule{{{5}}}, 3, rng));
}

TEST(SgcStream, EmpiricalLawMatchesIndependentGaussians) {
    const std::size_t M = 50, T = 20000;
    const SgcLaw law = measure_sgc_law(M, T, 1.5, 21);
    ASSERT_EQ(law.emitted_steps, M);
    for (std::size_t t = 0; t < M; ++t) {
        EXPECT_NEAR(law.step_mean[t], 1.5, 4.0 * std::sqrt(static_cast<double>(M) / T));
        EXPECT_NEAR(law.step_variance[t] / M, 1.0, 0.05);
    }
    // Family-wise 1% bound on the largest of the step-pair correlations.
    const double bound = normal_upper_quantile(0.01 / (2.0 * law.pairs)) / std::sqrt(static_cast<double>(T));
    EXPECT_LE(law.max_abs_correlation, bound);
    const SgcLaw null_law = measure_sgc_law(M, T, 0.0, 22);
    for (double p : null_law.ks_p_value) EXPECT_GE(p, 0.01 / M);
}
