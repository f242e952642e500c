#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "stpca/errors.hpp"
#include "stpca/model.hpp"

using namespace stpca;

TEST(SampleSignal, FullSupportBinaryIsAllOnes) {
    Rng rng(1);
    const Signal s = sample_signal({5, 5, 3, Prior::Binary, 0.0, false}, rng);
    EXPECT_EQ(s.values, std::vector<Spin>(5, 1));
    EXPECT_EQ(s.k, 5u);
}

TEST(SampleSignal, KGreaterThanNThrows) {
    Rng rng(1);
    EXPECT_THROW(sample_signal({3, 4, 2, Prior::Binary, 0.0, false}, rng), InvalidParameters);
}

TEST(SampleSignal, BadOrderThrows) {
    Rng rng(1);
    EXPECT_THROW(sample_signal({3, 2, 1, Prior::Binary, 0.0, false}, rng), InvalidParameters);
}

TEST(SampleSignal, RademacherPairsUniform) {
    // Multinomial over the 6 support pairs of [4], and the 4 sign patterns.
    Rng rng(2);
    const std::size_t draws = 60000;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> pairs;
    std::map<int, std::size_t> signs;
    for (std::size_t d = 0; d < draws; ++d) {
        const Signal s = sample_signal({4, 2, 3, Prior::Rademacher, 0.0, false}, rng);
        const auto supp = s.support();
        ASSERT_EQ(supp.size(), 2u);
        for (std::size_t i : supp) ASSERT_TRUE(s.values[i] == 1 || s.values[i] == -1);
        ++pairs[{supp[0], supp[1]}];
        ++signs[(s.values[supp[0]] > 0) * 2 + (s.values[supp[1]] > 0)];
    }
    ASSERT_EQ(pairs.size(), 6u);
    const double p = 1.0 / 6.0;
    const double band = 3.0 * std::sqrt(draws * p * (1 - p));
    for (const auto& [_, c] : pairs) EXPECT_NEAR(static_cast<double>(c), draws * p, band);
    ASSERT_EQ(signs.size(), 4u);
    const double band4 = 3.0 * std::sqrt(draws * 0.25 * 0.75);
    for (const auto& [_, c] : signs) EXPECT_NEAR(static_cast<double>(c), draws * 0.25, band4);
}

TEST(BuildObservation, NullModelMoments) {
    // Per instance the mean is checked against 4 / sqrt(n^r). One instance has
    // only 400 entries (sample-variance sd ~0.07), so the 5% variance check
    // pools 20 independent instances.
    const std::size_t n = 20;
    const ProblemParams p{n, 5, 2, Prior::Binary, 0.0, false};
    double pooled_ss = 0.0;
    std::size_t pooled = 0;
    for (std::uint64_t run = 0; run < 20; ++run) {
        Rng sig(3, run, StreamPurpose::Signal), noise(3, run, StreamPurpose::Noise);
        const Observation obs = build_observation(sample_signal(p, sig), p, noise);
        double mean = 0.0;
        for (double x : obs.tensor.entries()) mean += x;
        mean /= static_cast<double>(obs.tensor.size());
        EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(400.0));
        for (double x : obs.tensor.entries()) pooled_ss += x * x;
        pooled += obs.tensor.size();
    }
    EXPECT_NEAR(pooled_ss / static_cast<double>(pooled), 1.0, 0.05);
}

TEST(BuildObservation, FrozenNoiseAllOnes) {
    const ProblemParams p{4, 4, 3, Prior::Binary, 8.0, false};  // lambda = k^{r/2}
    Rng sig(1), noise(1);
    const Observation obs = build_observation(sample_signal(p, sig), p, noise, NoiseSource::Zero);
    for (double x : obs.tensor.entries()) EXPECT_DOUBLE_EQ(x, 1.0);
}

TEST(BuildObservation, PlantedMeanExactWithFrozenNoise) {
    const ProblemParams p{7, 3, 3, Prior::Rademacher, 5.0, false};
    Rng sig(9), noise(9);
    const Signal theta = sample_signal(p, sig);
    const Observation obs = build_observation(theta, p, noise, NoiseSource::Zero);
    const double scale = 5.0 / std::pow(3.0, 1.5);
    for (std::size_t flat = 0; flat < obs.tensor.size(); ++flat) {
        double expect = scale;
        for (std::size_t i : obs.tensor.decode(flat)) expect *= theta.values[i];
        EXPECT_DOUBLE_EQ(obs.tensor[flat], expect);
    }
}

TEST(BuildObservation, PlantedMeanOnSupport) {
    const ProblemParams p{30, 10, 2, Prior::Binary, 100.0, false};
    Rng sig(5), noise(6);
    const Signal theta = sample_signal(p, sig);
    const Observation obs = build_observation(theta, p, noise);
    const auto supp = theta.support();
    double mean = 0.0;
    for (std::size_t i : supp)
        for (std::size_t j : supp) mean += obs.tensor[i * 30 + j];
    mean /= 100.0;
    // average of k^r = 100 unit Gaussians around lambda / k^{r/2} = 10
    EXPECT_NEAR(mean, 10.0, 4.0 / std::sqrt(100.0));
}

TEST(BuildObservation, SeedDeterminism) {
    const ProblemParams p{9, 4, 3, Prior::Rademacher, 3.0, false};
    auto make = [&] {
        Rng sig(77, 5, StreamPurpose::Signal), noise(77, 5, StreamPurpose::Noise);
        return build_observation(sample_signal(p, sig), p, noise);
    };
    EXPECT_EQ(make().tensor, make().tensor);
}

TEST(BuildObservation, SymmetrizedNoiseIsSymmetricWithUnitOffDiagonalVariance) {
    const ProblemParams p{12, 3, 3, Prior::Binary, 0.0, true};
    double ss = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng sig(seed), noise(seed + 100);
        const Observation obs = build_observation(sample_signal(p, sig), p, noise);
        const DenseTensor& Y = obs.tensor;
        for (std::size_t a = 0; a < 12; ++a)
            for (std::size_t b = 0; b < 12; ++b)
                for (std::size_t c = 0; c < 12; ++c) {
                    const double v = Y[(a * 12 + b) * 12 + c];
                    ASSERT_NEAR(v, Y[(b * 12 + c) * 12 + a], 1e-12);
                    ASSERT_NEAR(v, Y[(b * 12 + a) * 12 + c], 1e-12);
                    if (a < b && b < c) {
                        ss += v * v;
                        ++count;
                    }
                }
    }
    EXPECT_NEAR(ss / static_cast<double>(count), 1.0, 0.08);
}

TEST(Prior, ParseRoundTrip) {
    EXPECT_EQ(parse_prior(to_string(Prior::Binary)), Prior::Binary);
    EXPECT_EQ(parse_prior(to_string(Prior::Rademacher)), Prior::Rademacher);
    EXPECT_ANY_THROW(parse_prior("gaussian"));
}
