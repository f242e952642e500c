#include "stpca/contraction.hpp"

#include <cmath>
#include <stdexcept>

namespace stpca {

SparseVector SparseVector::from_spins(std::span<const Spin> values) {
    SparseVector v;
    v.position_.assign(values.size(), -1);
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] != 0) v.push_back(static_cast<std::uint32_t>(i), values[i]);
    return v;
}

SparseVector SparseVector::basis(std::size_t i, double weight) {
    SparseVector v;
    v.push_back(static_cast<std::uint32_t>(i), weight);
    return v;
}

void SparseVector::push_back(std::uint32_t i, double w) {
    if (i >= position_.size()) position_.resize(i + 1, -1);
    position_[i] = static_cast<std::int64_t>(index_.size());
    index_.push_back(i);
    weight_.push_back(w);
}

void SparseVector::erase(std::uint32_t i) {
    if (i >= position_.size() || position_[i] < 0) return;
    const auto slot = static_cast<std::size_t>(position_[i]);
    const std::size_t last = index_.size() - 1;
    if (slot != last) {
        index_[slot] = index_[last];
        weight_[slot] = weight_[last];
        position_[index_[slot]] = static_cast<std::int64_t>(slot);
    }
    index_.pop_back();
    weight_.pop_back();
    position_[i] = -1;
}

void SparseVector::set(std::uint32_t i, double w) {
    if (w == 0.0) {
        erase(i);
        return;
    }
    if (i < position_.size() && position_[i] >= 0) {
        weight_[static_cast<std::size_t>(position_[i])] = w;
        return;
    }
    push_back(i, w);
}

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        correction_ += (sum_ - t) + x;
    else
        correction_ += (x - t) + sum_;
    sum_ = t;
}

namespace {

template <bool Compensated>
double contract_rec(const double* data, const SlotVector* slots, const std::size_t* strides, int depth, int last) {
    const SlotVector& s = slots[depth];
    const auto at = [&s](std::size_t j) -> std::size_t { return s.index ? s.index[j] : j; };
    if (depth == last) {
        if constexpr (Compensated) {
            CompensatedSum acc;
            for (std::size_t j = 0; j < s.length; ++j) acc.add(data[at(j)] * s.weight[j]);
            return acc.value();
        } else {
            double acc = 0.0;
            if (!s.index) {
                for (std::size_t j = 0; j < s.length; ++j) acc += data[j] * s.weight[j];
                return acc;
            }
            for (std::size_t j = 0; j < s.length; ++j) acc += data[s.index[j]] * s.weight[j];
            return acc;
        }
    }
    const std::size_t stride = strides[depth];
    if constexpr (Compensated) {
        CompensatedSum acc;
        for (std::size_t j = 0; j < s.length; ++j)
            acc.add(s.weight[j] * contract_rec<true>(data + at(j) * stride, slots, strides, depth + 1, last));
        return acc.value();
    } else {
        double acc = 0.0;
        for (std::size_t j = 0; j < s.length; ++j) {
            if (s.weight[j] == 0.0) continue;
            acc += s.weight[j] * contract_rec<false>(data + at(j) * stride, slots, strides, depth + 1, last);
        }
        return acc;
    }
}

}  // namespace

double contract(const DenseTensor& tensor, std::span<const SlotVector> slots) {
    const int r = tensor.order();
    if (slots.size() != static_cast<std::size_t>(r)) throw std::invalid_argument("slot count must equal tensor order");
    double terms = 1.0;
    for (const auto& s : slots) {
        if (s.length == 0) return 0.0;
        terms *= static_cast<double>(s.length);
    }
    if (terms > kCompensationThreshold)
        return contract_rec<true>(tensor.data(), slots.data(), tensor.strides().data(), 0, r - 1);
    return contract_rec<false>(tensor.data(), slots.data(), tensor.strides().data(), 0, r - 1);
}

namespace {

/// out[:] += scale * sum over the slots before the last of prod w * Y[.., :],
/// walking contiguous rows of the last index.
void accumulate_rows(const double* data, const SlotVector* slots, const std::size_t* strides, int depth, int last,
                     double scale, double* out, std::size_t n) {
    if (depth == last) {
        for (std::size_t i = 0; i < n; ++i) out[i] += scale * data[i];
        return;
    }
    const SlotVector& s = slots[depth];
    for (std::size_t j = 0; j < s.length; ++j) {
        if (s.weight[j] == 0.0) continue;
        const std::size_t at = s.index ? s.index[j] : j;
        accumulate_rows(data + at * strides[depth], slots, strides, depth + 1, last, scale * s.weight[j], out, n);
    }
}

}  // namespace

void contract_free_slot(const DenseTensor& tensor, std::span<const SlotVector> slots, int free_slot, double scale,
                        std::span<double> out) {
    const int r = tensor.order();
    if (slots.size() != static_cast<std::size_t>(r)) throw std::invalid_argument("slot count must equal tensor order");
    if (out.size() != tensor.dim()) throw std::invalid_argument("output length must equal tensor dimension");
    for (int m = 0; m < r; ++m) {
        if (m != free_slot && slots[m].length == 0) return;
    }
    if (free_slot == r - 1) {
        accumulate_rows(tensor.data(), slots.data(), tensor.strides().data(), 0, r - 1, scale, out.data(),
                        tensor.dim());
        return;
    }
    std::vector<SlotVector> local(slots.begin(), slots.end());
    std::uint32_t idx = 0;
    const double one = 1.0;
    local[free_slot] = SlotVector{&idx, &one, 1};
    for (std::size_t i = 0; i < tensor.dim(); ++i) {
        idx = static_cast<std::uint32_t>(i);
        out[i] += scale * contract_rec<false>(tensor.data(), local.data(), tensor.strides().data(), 0, r - 1);
    }
}

}  // namespace stpca
