#include "stpca/evaluator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "stpca/errors.hpp"

namespace stpca {

namespace {

/// Tensors at least this large get a rotated copy for cache-friendly updates.
constexpr std::size_t kRotateThreshold = 1u << 18;

DenseTensor rotate_last_to_front(const DenseTensor& Y) {
    const std::size_t n = Y.dim();
    const std::size_t block = Y.size() / n;
    DenseTensor out(n, Y.order());
    for (std::size_t f = 0; f < Y.size(); ++f) out[(f % n) * block + f / n] = Y[f];
    return out;
}

double int_pow(int a, int p) {
    double out = 1.0;
    for (int m = 0; m < p; ++m) out *= a;
    return out;
}

}  // namespace

IncrementalEvaluator::IncrementalEvaluator(const DenseTensor& Y, SearchState state, HamiltonianParams hp)
    : Y_(&Y), state_(std::move(state)), hp_(hp), r_(Y.order()) {
    if (state_.size() != Y.dim()) throw InvalidState("state length differs from tensor dimension");
    hp_.validate();
    for (unsigned mask = 1; mask < (1u << r_); ++mask)
        if (std::popcount(mask) >= 2) higher_masks_.push_back(mask);
    if (r_ >= 3 && Y.size() >= kRotateThreshold) rotated_ = rotate_last_to_front(Y);
    refresh();
}

SlotVector IncrementalEvaluator::sigma_view() const {
    if (4 * support_.size() >= dense_.size()) return {nullptr, dense_.data(), dense_.size()};
    return support_.view();
}

void IncrementalEvaluator::refresh() {
    support_ = SparseVector::from_spins(state_.values());
    const std::size_t n = Y_->dim();
    dense_.assign(state_.values().begin(), state_.values().end());
    fields_.assign(static_cast<std::size_t>(r_), std::vector<double>(n, 0.0));
    std::vector<SlotVector> slots(static_cast<std::size_t>(r_), support_.view());
    for (int m = 0; m < r_; ++m) contract_free_slot(*Y_, slots, m, 1.0, fields_[m]);
    CompensatedSum acc;
    for (std::size_t j = 0; j < support_.size(); ++j)
        acc.add(support_.weights()[j] * fields_[0][support_.indices()[j]]);
    inner_ = acc.value();
}

double IncrementalEvaluator::delta_inner(std::size_t i, Spin q) const {
    const int a = q - state_[i];
    if (a == 0) return 0.0;
    double first = 0.0;
    for (int m = 0; m < r_; ++m) first += fields_[m][i];
    double total = a * first;
    const std::uint32_t idx = static_cast<std::uint32_t>(i);
    const double one = 1.0;
    const SlotVector e{&idx, &one, 1};
    const SlotVector s = sigma_view();
    SlotVector slots[16];
    for (unsigned mask : higher_masks_) {
        for (int m = 0; m < r_; ++m) slots[m] = (mask >> m) & 1u ? e : s;
        total += int_pow(a, std::popcount(mask)) * contract(*Y_, std::span<const SlotVector>(slots, r_));
    }
    return total;
}

double IncrementalEvaluator::delta_energy(std::size_t i, Spin q) const {
    const Spin old = state_[i];
    if (old == q) return 0.0;
    const std::size_t before = state_.support_size();
    const std::size_t after = before - (old != 0) + (q != 0);
    const double pen = penalty_change(before, after, hp_);
    if (std::isinf(pen)) return -pen;
    return delta_inner(i, q) - pen;
}

double IncrementalEvaluator::commit(const Move& mv) {
    const std::size_t j = mv.coordinate;
    const int a = mv.new_value - state_[j];
    if (a == 0) return 0.0;
    const double d_inner = delta_inner(j, mv.new_value);
    const std::size_t before = state_.support_size();
    const std::size_t after = before - (state_[j] != 0) + (mv.new_value != 0);
    const double pen = penalty_change(before, after, hp_);

    // g_m(sigma + a e_j) - g_m(sigma) expands over nonempty subsets S' of the
    // other slots: a^{|S'|} <e_j on S', e_i on m, sigma elsewhere>
    const std::uint32_t idx = static_cast<std::uint32_t>(j);
    const double one = 1.0;
    const SlotVector e{&idx, &one, 1};
    const SlotVector s = sigma_view();
    std::vector<SlotVector> slots(static_cast<std::size_t>(r_));
    const unsigned full = (1u << r_) - 1u;
    const unsigned last = 1u << (r_ - 1);
    for (int m = 0; m < r_; ++m) {
        const unsigned others = full & ~(1u << m);
        for (unsigned sub = others; sub != 0; sub = (sub - 1) & others) {
            const double scale = int_pow(a, std::popcount(sub));
            if ((sub & last) && rotated_.size() != 0) {
                slots[0] = e;
                for (int t = 0; t + 1 < r_; ++t) slots[t + 1] = (sub >> t) & 1u ? e : s;
                contract_free_slot(rotated_, slots, m + 1, scale, fields_[m]);
            } else {
                for (int t = 0; t < r_; ++t) slots[t] = (sub >> t) & 1u ? e : s;
                contract_free_slot(*Y_, slots, m, scale, fields_[m]);
            }
        }
    }
    state_.apply(mv);
    support_.set(idx, static_cast<double>(mv.new_value));
    dense_[j] = static_cast<double>(mv.new_value);
    inner_ += d_inner;
    if (support_.size() == 0) {
        // sigma = 0 has exactly zero fields; drop accumulated rounding so the
        // +1 / -1 symmetry of the next move is exact
        for (auto& f : fields_) std::fill(f.begin(), f.end(), 0.0);
        inner_ = 0.0;
    }
    return d_inner - pen;
}

double IncrementalEvaluator::energy() const noexcept {
    if (hp_.infinite_beta() || hp_.gamma == 0.0) return inner_;
    return inner_ - hp_.gamma * std::pow(static_cast<double>(state_.support_size()), hp_.beta);
}

}  // namespace stpca
