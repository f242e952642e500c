#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stpca/rng.hpp"
#include "stpca/tensor.hpp"

namespace stpca {

using Spin = std::int8_t;

enum class Prior { Binary, Rademacher };

std::string_view to_string(Prior prior);
Prior parse_prior(std::string_view text);

struct ProblemParams {
    std::size_t n = 0;
    std::size_t k = 0;
    int r = 2;
    Prior prior = Prior::Binary;
    double lambda = 0.0;
    bool symmetrize_noise = false;

    /// Throws InvalidParameters unless 1 <= k <= n, r >= 2 and lambda >= 0.
    void validate() const;
};

/// The planted vector: exactly k nonzero entries in {-1, +1}, all +1 under
/// the binary prior.
struct Signal {
    std::vector<Spin> values;
    std::size_t k = 0;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] std::vector<std::size_t> support() const;
};

/// The observed tensor Y together with the parameters that produced it.
struct Observation {
    DenseTensor tensor;
    ProblemParams params;
    std::uint64_t seed = 0;
};

enum class NoiseSource {
    Gaussian,
    /// W = 0; leaves only the planted rank-one term. Test hook.
    Zero,
};

/// Uniform draw from the k-sparse binary or Rademacher vectors.
Signal sample_signal(const ProblemParams& params, Rng& rng);

/// Y = lambda / k^(r/2) * theta^{(x)r} + W.
///
/// W has i.i.d. N(0,1) entries. With params.symmetrize_noise the noise is
/// replaced by sqrt(r!) times its average over all r! slot permutations, so
/// entries with distinct indices keep unit variance.
Observation build_observation(const Signal& theta, const ProblemParams& params, Rng& rng,
                              NoiseSource noise = NoiseSource::Gaussian, std::uint64_t seed = 0);

/// Same as build_observation but with a caller-provided noise tensor.
Observation build_observation_with_noise(const Signal& theta, const ProblemParams& params, DenseTensor noise,
                                         std::uint64_t seed = 0);

/// Average of the tensor over all slot permutations, scaled by sqrt(r!).
DenseTensor symmetrize(const DenseTensor& tensor);

/// Adds scale * prod_m v[i_m] over supp(v)^r in place.
void add_rank_one(DenseTensor& tensor, std::span<const Spin> v, double scale);

}  // namespace stpca
