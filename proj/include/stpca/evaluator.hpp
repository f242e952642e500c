#pragma once

#include <cstddef>
#include <vector>

#include "stpca/contraction.hpp"
#include "stpca/hamiltonian.hpp"

namespace stpca {

/// Owns a search state and answers single-coordinate delta queries in low
/// order cost.
///
/// Caches the r first-order fields g_m[i] = <sigma (x) .. e_i (slot m) .. (x) sigma, Y>.
/// A delta query then costs r lookups plus the higher-order slot-subset terms
/// (O(2^r * ||sigma||_0^{r-2})); committing a move updates every field in
/// O(r * 2^{r-1} * n * ||sigma||_0^{r-2}).
class IncrementalEvaluator {
public:
    IncrementalEvaluator(const DenseTensor& Y, SearchState state, HamiltonianParams hp);

    [[nodiscard]] const SearchState& state() const noexcept { return state_; }
    [[nodiscard]] const HamiltonianParams& params() const noexcept { return hp_; }
    [[nodiscard]] std::size_t dim() const noexcept { return state_.size(); }

    /// Same value as stpca::delta_inner(Y, state(), {i, q}).
    [[nodiscard]] double delta_inner(std::size_t i, Spin q) const;
    /// Same value as stpca::delta_energy(Y, state(), {i, q}, params()).
    [[nodiscard]] double delta_energy(std::size_t i, Spin q) const;

    /// Applies the move, updating fields and the tracked energy. Returns the
    /// energy change.
    double commit(const Move& mv);

    /// Tracked H(state) (initial energy plus committed deltas).
    [[nodiscard]] double energy() const noexcept;
    [[nodiscard]] double inner() const noexcept { return inner_; }

    /// Recompute all fields and the inner product from scratch.
    void refresh();

    [[nodiscard]] double field(int slot, std::size_t i) const { return fields_[slot][i]; }

private:
    const DenseTensor* Y_;
    /// Y with its last index moved to the front, so slices with e_j in the
    /// last slot are contiguous. Empty for small tensors.
    DenseTensor rotated_;
    SearchState state_;
    HamiltonianParams hp_;
    int r_;
    /// Contraction view of sigma: sparse, or dense once the support is large.
    [[nodiscard]] SlotVector sigma_view() const;

    SparseVector support_;
    std::vector<double> dense_;
    std::vector<std::vector<double>> fields_;
    std::vector<unsigned> higher_masks_;
    double inner_ = 0.0;
};

}  // namespace stpca
