#include "stpca/sgc.hpp"

#include <cmath>

#include "stpca/errors.hpp"

namespace stpca {

ThresholdBank::ThresholdBank(std::size_t n, std::size_t budget, std::vector<double> z)
    : n_(n), budget_(budget), z_(std::move(z)), cursors_(n, 0) {
    if (n == 0 || budget == 0) throw InvalidParameters("threshold bank needs n >= 1 and M >= 1");
    if (z_.size() != n * budget) throw InvalidParameters("threshold bank storage size mismatch");
}

ThresholdBank ThresholdBank::zeros(std::size_t n, std::size_t budget) {
    return ThresholdBank(n, budget, std::vector<double>(n * budget, 0.0));
}

std::optional<double> ThresholdBank::next_threshold(std::size_t i) {
    if (i >= n_) throw InvalidParameters("threshold coordinate out of range");
    if (cursors_[i] >= budget_) return std::nullopt;
    return z_[i * budget_ + cursors_[i]++];
}

void ThresholdBank::reset_cursors() { std::fill(cursors_.begin(), cursors_.end(), 0); }

namespace {

void centered_gaussian_row(std::span<double> row, Rng& rng) {
    const double sd = std::sqrt(static_cast<double>(row.size()));
    double sum = 0.0;
    for (double& g : row) {
        g = rng.normal(0.0, sd);
        sum += g;
    }
    const double mean = sum / static_cast<double>(row.size());
    for (double& g : row) g -= mean;
}

}  // namespace

ThresholdBank generate_thresholds(std::size_t n, std::size_t budget, Rng& rng) {
    if (n == 0 || budget == 0) throw InvalidParameters("threshold bank needs n >= 1 and M >= 1");
    std::vector<double> z(n * budget);
    for (std::size_t i = 0; i < n; ++i)
        centered_gaussian_row(std::span<double>(z).subspan(i * budget, budget), rng);
    return ThresholdBank(n, budget, std::move(z));
}

void CloneSchedule::validate(std::size_t N) const {
    for (const auto& s : subsets) {
        if (s.empty()) throw InvalidParameters("clone schedule subsets must be nonempty");
        for (std::size_t i : s)
            if (i >= N) throw InvalidParameters("clone schedule coordinate out of range");
    }
}

std::vector<CloneObservation> sgc_stream(std::span<const double> mu, const CloneSchedule& schedule,
                                         std::size_t budget, Rng& rng) {
    const std::size_t N = mu.size();
    if (N == 0) throw InvalidParameters("sgc needs a nonempty mean vector");
    schedule.validate(N);
    ThresholdBank bank = generate_thresholds(N, budget, rng);
    std::vector<double> y(mu.begin(), mu.end());
    for (double& v : y) v += rng.normal();

    std::vector<CloneObservation> out;
    for (const auto& subset : schedule.subsets) {
        bool fits = true;
        for (std::size_t i : subset)
            if (bank.exhausted(i)) fits = false;
        if (!fits) break;
        CloneObservation obs{subset, {}};
        obs.values.reserve(subset.size());
        for (std::size_t i : subset) obs.values.push_back(y[i] + *bank.next_threshold(i));
        out.push_back(std::move(obs));
    }
    return out;
}

}  // namespace stpca
