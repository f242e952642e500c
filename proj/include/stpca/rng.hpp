#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace stpca {

/// Purpose tags for independent random streams within one run.
enum class StreamPurpose : std::uint64_t {
    Signal = 1,
    Noise = 2,
    Init = 3,
    Proposals = 4,
    Thresholds = 5,
    SecondStageThresholds = 6,
    SecondStageProposals = 7,
    Verification = 8,
};

/// SplitMix64 finalizer. Used to derive well-separated engine seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// A random stream keyed by (experiment seed, run index, purpose).
///
/// Streams with different keys are statistically independent for all
/// practical purposes, so replications can run in any order or on any
/// worker and still reproduce bit-for-bit.
class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed);
    Rng(std::uint64_t seed, std::uint64_t run_index, StreamPurpose purpose);

    /// Derive an independent child stream.
    [[nodiscard]] Rng split(std::uint64_t tag) const;

    double normal(double mean = 0.0, double stddev = 1.0);
    double uniform01();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    engine_type& engine() noexcept { return engine_; }
    [[nodiscard]] std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace stpca
