#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace stpca {

/// Dense order-r tensor over [n]^r stored as a flat row-major array.
///
/// The multi-index (i_1, ..., i_r) maps to sum_m i_m * n^(r-m) (0-based),
/// so the last index is contiguous.
class DenseTensor {
public:
    DenseTensor() = default;
    DenseTensor(std::size_t n, int r);
    DenseTensor(std::size_t n, int r, std::vector<double> entries);

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    [[nodiscard]] int order() const noexcept { return r_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    /// Stride of slot m (0-based): n^(r-1-m).
    [[nodiscard]] std::size_t stride(int slot) const noexcept { return strides_[slot]; }
    [[nodiscard]] std::span<const std::size_t> strides() const noexcept { return strides_; }

    [[nodiscard]] std::size_t encode(std::span<const std::size_t> index) const;
    [[nodiscard]] std::vector<std::size_t> decode(std::size_t flat) const;

    [[nodiscard]] double at(std::span<const std::size_t> index) const { return data_[encode(index)]; }
    double& at(std::span<const std::size_t> index) { return data_[encode(index)]; }

    [[nodiscard]] double operator[](std::size_t flat) const noexcept { return data_[flat]; }
    double& operator[](std::size_t flat) noexcept { return data_[flat]; }

    [[nodiscard]] std::span<const double> entries() const noexcept { return data_; }
    [[nodiscard]] std::span<double> entries() noexcept { return data_; }
    [[nodiscard]] const double* data() const noexcept { return data_.data(); }

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    std::size_t n_ = 0;
    int r_ = 0;
    std::vector<std::size_t> strides_;
    std::vector<double> data_;
};

/// n^r with an overflow check; throws InvalidParameters if it does not fit.
std::size_t tensor_entry_count(std::size_t n, int r);

/// Elementwise max(Y, 0).
DenseTensor truncate_nonnegative(const DenseTensor& tensor);

/// Binary tensor dump: 8-byte magic "STPCATN1", then u64 n, u64 r, u64 seed,
/// then n^r little-endian IEEE-754 doubles in row-major order.
void write_tensor(const std::filesystem::path& path, const DenseTensor& tensor, std::uint64_t seed);

struct TensorFile {
    DenseTensor tensor;
    std::uint64_t seed = 0;
};

TensorFile read_tensor(const std::filesystem::path& path);

}  // namespace stpca
