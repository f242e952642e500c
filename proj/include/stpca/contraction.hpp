#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stpca/model.hpp"
#include "stpca/tensor.hpp"

namespace stpca {

/// Non-owning sparse vector view used as one slot of a multilinear contraction.
/// A null index pointer means the dense slot 0..length-1.
struct SlotVector {
    const std::uint32_t* index = nullptr;
    const double* weight = nullptr;
    std::size_t length = 0;

    [[nodiscard]] std::size_t size() const noexcept { return length; }
};

/// Owning sparse vector with stable storage for SlotVector views.
class SparseVector {
public:
    SparseVector() = default;
    static SparseVector from_spins(std::span<const Spin> values);
    static SparseVector basis(std::size_t i, double weight = 1.0);

    void push_back(std::uint32_t i, double w);
    /// Removes entry i if present (swap-with-last; order is not preserved).
    void erase(std::uint32_t i);
    /// Sets the weight of i, inserting or erasing as needed (0 erases).
    void set(std::uint32_t i, double w);

    [[nodiscard]] SlotVector view() const noexcept { return {index_.data(), weight_.data(), index_.size()}; }
    [[nodiscard]] std::size_t size() const noexcept { return index_.size(); }
    [[nodiscard]] std::span<const std::uint32_t> indices() const noexcept { return index_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weight_; }

private:
    std::vector<std::uint32_t> index_;
    std::vector<double> weight_;
    std::vector<std::int64_t> position_;  // dense map coordinate -> slot in index_, -1 if absent
};

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept;
    [[nodiscard]] double value() const noexcept { return sum_ + correction_; }

private:
    double sum_ = 0.0;
    double correction_ = 0.0;
};

/// Term count above which contractions switch to compensated summation.
inline constexpr double kCompensationThreshold = 1e6;

/// sum over i_1 in slot_1, ..., i_r in slot_r of Y[i_1..i_r] * prod_m w_m(i_m).
/// Cost is the product of slot lengths.
double contract(const DenseTensor& tensor, std::span<const SlotVector> slots);

/// For every coordinate i, adds scale * contract(slots with e_i placed in free_slot)
/// to out[i]. The entry of `slots` at free_slot is ignored.
void contract_free_slot(const DenseTensor& tensor, std::span<const SlotVector> slots, int free_slot, double scale,
                        std::span<double> out);

}  // namespace stpca
