#include "stpca/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stpca/errors.hpp"

namespace stpca {

std::string_view to_string(Prior prior) {
    return prior == Prior::Binary ? "binary" : "rademacher";
}

Prior parse_prior(std::string_view text) {
    if (text == "binary") return Prior::Binary;
    if (text == "rademacher") return Prior::Rademacher;
    throw InvalidParameters("unknown prior '" + std::string(text) + "'");
}

void ProblemParams::validate() const {
    if (n == 0) throw InvalidParameters("n must be positive");
    if (k < 1 || k > n) throw InvalidParameters("sparsity k must satisfy 1 <= k <= n");
    if (r < 2) throw InvalidParameters("tensor order r must be at least 2");
    if (!(lambda >= 0.0)) throw InvalidParameters("lambda must be non-negative");
}

std::vector<std::size_t> Signal::support() const {
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] != 0) out.push_back(i);
    return out;
}

Signal sample_signal(const ProblemParams& params, Rng& rng) {
    params.validate();
    std::vector<std::size_t> perm(params.n);
    std::iota(perm.begin(), perm.end(), 0);
    // partial Fisher-Yates: the first k slots are a uniform k-subset
    for (std::size_t i = 0; i < params.k; ++i) {
        const std::size_t j = i + rng.below(params.n - i);
        std::swap(perm[i], perm[j]);
    }
    Signal theta{std::vector<Spin>(params.n, 0), params.k};
    for (std::size_t i = 0; i < params.k; ++i) {
        Spin s = 1;
        if (params.prior == Prior::Rademacher && rng.below(2) == 0) s = -1;
        theta.values[perm[i]] = s;
    }
    return theta;
}

void add_rank_one(DenseTensor& tensor, std::span<const Spin> v, double scale) {
    std::vector<std::size_t> supp;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) supp.push_back(i);
    if (supp.empty()) return;
    const int r = tensor.order();
    std::vector<std::size_t> pos(static_cast<std::size_t>(r), 0);
    while (true) {
        std::size_t flat = 0;
        int sign = 1;
        for (int m = 0; m < r; ++m) {
            const std::size_t i = supp[pos[m]];
            flat += i * tensor.stride(m);
            sign *= v[i];
        }
        tensor[flat] += scale * sign;
        int m = r - 1;
        while (m >= 0 && ++pos[m] == supp.size()) pos[m--] = 0;
        if (m < 0) break;
    }
}

DenseTensor symmetrize(const DenseTensor& tensor) {
    const int r = tensor.order();
    DenseTensor out(tensor.dim(), r);
    std::vector<int> slots(static_cast<std::size_t>(r));
    double factorial = 1.0;
    for (int m = 2; m <= r; ++m) factorial *= m;
    const double scale = std::sqrt(factorial) / factorial;
    for (std::size_t flat = 0; flat < tensor.size(); ++flat) {
        const auto index = tensor.decode(flat);
        std::iota(slots.begin(), slots.end(), 0);
        double sum = 0.0;
        do {
            std::size_t permuted = 0;
            for (int m = 0; m < r; ++m) permuted += index[slots[m]] * tensor.stride(m);
            sum += tensor[permuted];
        } while (std::next_permutation(slots.begin(), slots.end()));
        out[flat] = scale * sum;
    }
    return out;
}

Observation build_observation_with_noise(const Signal& theta, const ProblemParams& params, DenseTensor noise,
                                         std::uint64_t seed) {
    params.validate();
    if (theta.size() != params.n || theta.k != params.k)
        throw InvalidParameters("signal is inconsistent with problem parameters");
    if (noise.dim() != params.n || noise.order() != params.r)
        throw InvalidParameters("noise tensor shape does not match parameters");
    const double scale = params.lambda / std::pow(static_cast<double>(params.k), params.r / 2.0);
    add_rank_one(noise, theta.values, scale);
    return Observation{std::move(noise), params, seed};
}

Observation build_observation(const Signal& theta, const ProblemParams& params, Rng& rng, NoiseSource source,
                              std::uint64_t seed) {
    params.validate();
    DenseTensor noise(params.n, params.r);
    if (source == NoiseSource::Gaussian) {
        for (double& w : noise.entries()) w = rng.normal();
        if (params.symmetrize_noise) noise = symmetrize(noise);
    }
    return build_observation_with_noise(theta, params, std::move(noise), seed);
}

}  // namespace stpca
