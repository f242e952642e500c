#include "stpca/hamiltonian.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "stpca/contraction.hpp"
#include "stpca/errors.hpp"

namespace stpca {

void HamiltonianParams::validate() const {
    if (!(gamma >= 0.0)) throw InvalidParameters("gamma must be non-negative");
    if (!(beta > 0.0)) throw InvalidParameters("beta must be positive");
}

SearchState::SearchState(std::vector<Spin> values) : values_(std::move(values)) {
    for (Spin v : values_) {
        if (v < -1 || v > 1) throw InvalidState("state entries must lie in {-1,0,1}");
        if (v != 0) ++support_size_;
    }
}

SearchState::SearchState(std::vector<Spin> values, std::span<const Spin> signal) : SearchState(std::move(values)) {
    attach_signal(signal);
}

void SearchState::attach_signal(std::span<const Spin> signal) {
    if (signal.size() != values_.size()) throw InvalidState("signal length differs from state length");
    signal_ = std::make_shared<const std::vector<Spin>>(signal.begin(), signal.end());
    overlap_ = 0;
    hamming_ = 0;
    signal_support_ = 0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        overlap_ += values_[i] * signal[i];
        hamming_ += values_[i] != signal[i];
        signal_support_ += signal[i] != 0;
    }
}

long SearchState::overlap() const {
    if (!signal_) throw InvalidState("state does not track a signal");
    return overlap_;
}

std::size_t SearchState::hamming_to_signal() const {
    if (!signal_) throw InvalidState("state does not track a signal");
    return hamming_;
}

double SearchState::cosine() const {
    if (!signal_) throw InvalidState("state does not track a signal");
    if (support_size_ == 0 || signal_support_ == 0) return 0.0;
    return static_cast<double>(overlap_) /
           std::sqrt(static_cast<double>(support_size_) * static_cast<double>(signal_support_));
}

void SearchState::apply(const Move& mv) {
    if (mv.coordinate >= values_.size()) throw std::out_of_range("move coordinate out of range");
    if (mv.new_value < -1 || mv.new_value > 1) throw InvalidState("move value must lie in {-1,0,1}");
    const Spin old = values_[mv.coordinate];
    if (old == mv.new_value) return;
    support_size_ = support_size_ - (old != 0) + (mv.new_value != 0);
    if (signal_) {
        const Spin t = (*signal_)[mv.coordinate];
        overlap_ += (mv.new_value - old) * t;
        hamming_ = hamming_ - (old != t) + (mv.new_value != t);
    }
    values_[mv.coordinate] = mv.new_value;
#ifndef NDEBUG
    check_invariants();
#endif
}

void SearchState::check_invariants() const {
    std::size_t support = 0;
    long overlap = 0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        support += values_[i] != 0;
        if (signal_) overlap += values_[i] * (*signal_)[i];
    }
    assert(support == support_size_);
    assert(!signal_ || overlap == overlap_);
    (void)support;
    (void)overlap;
}

bool SearchState::is_binary() const noexcept {
    for (Spin v : values_)
        if (v < 0) return false;
    return true;
}

bool SearchState::is_sign_vector() const noexcept {
    return support_size_ == values_.size();
}

double penalty_change(std::size_t support_before, std::size_t support_after, const HamiltonianParams& hp) {
    if (support_before == support_after) return 0.0;
    if (hp.infinite_beta()) return support_after > support_before ? std::numeric_limits<double>::infinity() : 0.0;
    if (hp.gamma == 0.0) return 0.0;
    return hp.gamma * (std::pow(static_cast<double>(support_after), hp.beta) -
                       std::pow(static_cast<double>(support_before), hp.beta));
}

double inner_product(const DenseTensor& Y, std::span<const Spin> sigma) {
    if (sigma.size() != Y.dim()) throw InvalidState("state length differs from tensor dimension");
    const SparseVector s = SparseVector::from_spins(sigma);
    std::vector<SlotVector> slots(static_cast<std::size_t>(Y.order()), s.view());
    return contract(Y, slots);
}

double energy(const DenseTensor& Y, const SearchState& sigma, const HamiltonianParams& hp) {
    const double inner = inner_product(Y, sigma.values());
    if (hp.infinite_beta() || hp.gamma == 0.0) return inner;
    return inner - hp.gamma * std::pow(static_cast<double>(sigma.support_size()), hp.beta);
}

double energy(const Observation& Y, const SearchState& sigma, const HamiltonianParams& hp) {
    return energy(Y.tensor, sigma, hp);
}

double delta_inner(const DenseTensor& Y, const SearchState& sigma, const Move& mv) {
    if (sigma.size() != Y.dim()) throw InvalidState("state length differs from tensor dimension");
    if (mv.coordinate >= sigma.size()) throw std::out_of_range("move coordinate out of range");
    const int a = mv.new_value - sigma[mv.coordinate];
    if (a == 0) return 0.0;
    const int r = Y.order();
    const SparseVector s = SparseVector::from_spins(sigma.values());
    const SparseVector e = SparseVector::basis(mv.coordinate);
    std::vector<SlotVector> slots(static_cast<std::size_t>(r));
    double total = 0.0;
    for (unsigned mask = 1; mask < (1u << r); ++mask) {
        for (int m = 0; m < r; ++m) slots[m] = (mask >> m) & 1u ? e.view() : s.view();
        const double term = contract(Y, slots);
        total += std::pow(static_cast<double>(a), std::popcount(mask)) * term;
    }
    return total;
}

double delta_inner(const Observation& Y, const SearchState& sigma, const Move& mv) {
    return delta_inner(Y.tensor, sigma, mv);
}

double delta_energy(const DenseTensor& Y, const SearchState& sigma, const Move& mv, const HamiltonianParams& hp) {
    const Spin old = sigma[mv.coordinate];
    if (old == mv.new_value) return 0.0;
    const std::size_t before = sigma.support_size();
    const std::size_t after = before - (old != 0) + (mv.new_value != 0);
    const double pen = penalty_change(before, after, hp);
    if (std::isinf(pen)) return -pen;
    return delta_inner(Y, sigma, mv) - pen;
}

double delta_energy(const Observation& Y, const SearchState& sigma, const Move& mv, const HamiltonianParams& hp) {
    return delta_energy(Y.tensor, sigma, mv, hp);
}

namespace {

long double ipow(long double base, int r) {
    long double out = 1.0L;
    for (int m = 0; m < r; ++m) out *= base;
    return out;
}

}  // namespace

double diff_frobenius(const SearchState& sigma, const Move& mv, int r) {
    if (mv.coordinate >= sigma.size()) throw std::out_of_range("move coordinate out of range");
    const int old = sigma[mv.coordinate];
    const int q = mv.new_value;
    if (old == q) return 0.0;
    // entries are in {-1,0,1}, so squared norms equal supports
    const long s = static_cast<long>(sigma.support_size());
    const long u_sq = s - std::abs(old) + std::abs(q);
    const long u_dot_sigma = s - std::abs(old) + q * old;
    const long double v2 = ipow(u_sq, r) - 2.0L * ipow(u_dot_sigma, r) + ipow(s, r);
    return v2 > 0 ? static_cast<double>(std::sqrt(v2)) : 0.0;
}

double rank1_inner(std::span<const double> u, std::span<const double> v, int r) {
    if (u.size() != v.size()) throw std::invalid_argument("rank1_inner needs equal-length vectors");
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
    return std::pow(dot, r);
}

double peel_score(const DenseTensor& Q, const SearchState& active, std::size_t i) {
    if (!active.is_binary()) throw InvalidState("peel_score requires a {0,1}-valued active set");
    if (active.size() != Q.dim()) throw InvalidState("state length differs from tensor dimension");
    if (i >= Q.dim()) throw std::out_of_range("coordinate out of range");
    const SparseVector p = SparseVector::from_spins(active.values());
    const SparseVector e = SparseVector::basis(i);
    std::vector<SlotVector> slots(static_cast<std::size_t>(Q.order()), p.view());
    slots[0] = e.view();
    return contract(Q, slots);
}

}  // namespace stpca
