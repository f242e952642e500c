#include "stpca/tensor.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "stpca/errors.hpp"

namespace stpca {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'T', 'P', 'C', 'A', 'T', 'N', '1'};

template <typename T>
T to_little_endian(T value) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
    return value;
}

void write_u64(std::ostream& out, std::uint64_t v) {
    v = to_little_endian(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return to_little_endian(v);
}

}  // namespace

std::size_t tensor_entry_count(std::size_t n, int r) {
    if (r < 1) throw InvalidParameters("tensor order must be positive");
    std::size_t count = 1;
    for (int m = 0; m < r; ++m) {
        if (n != 0 && count > std::numeric_limits<std::size_t>::max() / n)
            throw InvalidParameters("tensor size n^r overflows");
        count *= n;
    }
    return count;
}

DenseTensor::DenseTensor(std::size_t n, int r) : DenseTensor(n, r, std::vector<double>(tensor_entry_count(n, r), 0.0)) {}

DenseTensor::DenseTensor(std::size_t n, int r, std::vector<double> entries)
    : n_(n), r_(r), strides_(static_cast<std::size_t>(r)), data_(std::move(entries)) {
    if (data_.size() != tensor_entry_count(n, r))
        throw InvalidParameters("tensor entry count must equal n^r");
    std::size_t s = 1;
    for (int m = r - 1; m >= 0; --m) {
        strides_[m] = s;
        s *= n;
    }
}

std::size_t DenseTensor::encode(std::span<const std::size_t> index) const {
    if (index.size() != static_cast<std::size_t>(r_))
        throw std::out_of_range("multi-index length must equal tensor order");
    std::size_t flat = 0;
    for (int m = 0; m < r_; ++m) {
        if (index[m] >= n_) throw std::out_of_range("multi-index component out of range");
        flat += index[m] * strides_[m];
    }
    return flat;
}

std::vector<std::size_t> DenseTensor::decode(std::size_t flat) const {
    if (flat >= data_.size()) throw std::out_of_range("flat index out of range");
    std::vector<std::size_t> index(static_cast<std::size_t>(r_));
    for (int m = 0; m < r_; ++m) {
        index[m] = flat / strides_[m];
        flat %= strides_[m];
    }
    return index;
}

DenseTensor truncate_nonnegative(const DenseTensor& tensor) {
    DenseTensor out = tensor;
    for (double& v : out.entries()) v = std::max(v, 0.0);
    return out;
}

void write_tensor(const std::filesystem::path& path, const DenseTensor& tensor, std::uint64_t seed) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(kMagic.data(), kMagic.size());
    write_u64(out, tensor.dim());
    write_u64(out, static_cast<std::uint64_t>(tensor.order()));
    write_u64(out, seed);
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(tensor.data()),
                  static_cast<std::streamsize>(tensor.size() * sizeof(double)));
    } else {
        for (double v : tensor.entries()) {
            double le = to_little_endian(v);
            out.write(reinterpret_cast<const char*>(&le), sizeof le);
        }
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

TensorFile read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw std::runtime_error(path.string() + ": not a tensor dump");
    const std::uint64_t n = read_u64(in);
    const std::uint64_t r = read_u64(in);
    const std::uint64_t seed = read_u64(in);
    if (!in || r < 1 || r > 16) throw std::runtime_error(path.string() + ": corrupt header");
    std::vector<double> entries(tensor_entry_count(n, static_cast<int>(r)));
    in.read(reinterpret_cast<char*>(entries.data()), static_cast<std::streamsize>(entries.size() * sizeof(double)));
    if (!in) throw std::runtime_error(path.string() + ": truncated tensor data");
    if constexpr (std::endian::native == std::endian::big) {
        for (double& v : entries) v = to_little_endian(v);
    }
    return {DenseTensor(n, static_cast<int>(r), std::move(entries)), seed};
}

}  // namespace stpca
