#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "stpca/rng.hpp"

namespace stpca {

/// n x M matrix of centered Gaussian thresholds with per-coordinate cursors.
///
/// z[i][t] = G_i^t - mean_j G_i^j with G_i^j i.i.d. N(0, M).
class ThresholdBank {
public:
    ThresholdBank() = default;
    ThresholdBank(std::size_t n, std::size_t budget, std::vector<double> z);

    /// A bank whose every threshold is exactly 0. Test hook.
    static ThresholdBank zeros(std::size_t n, std::size_t budget);

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    [[nodiscard]] std::size_t budget() const noexcept { return budget_; }
    /// Threshold t (0-based) of coordinate i, regardless of the cursor.
    [[nodiscard]] double at(std::size_t i, std::size_t t) const { return z_[i * budget_ + t]; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return std::span<const double>(z_).subspan(i * budget_, budget_);
    }

    /// Number of thresholds already consumed by coordinate i.
    [[nodiscard]] std::size_t cursor(std::size_t i) const { return cursors_[i]; }
    [[nodiscard]] bool exhausted(std::size_t i) const { return cursors_[i] >= budget_; }
    /// Consume and return the next threshold of coordinate i; nullopt once all
    /// M have been used. The cursor never moves past M.
    std::optional<double> next_threshold(std::size_t i);
    void reset_cursors();

private:
    std::size_t n_ = 0;
    std::size_t budget_ = 0;
    std::vector<double> z_;
    std::vector<std::size_t> cursors_;
};

ThresholdBank generate_thresholds(std::size_t n, std::size_t budget, Rng& rng);

/// Sequence of nonempty coordinate subsets of [N].
struct CloneSchedule {
    std::vector<std::vector<std::size_t>> subsets;
    void validate(std::size_t N) const;
};

/// One emitted noised subset observation.
struct CloneObservation {
    std::vector<std::size_t> subset;
    std::vector<double> values;
};

/// Subset Gaussian Cloning.
///
/// Draws Y = mu + Z with Z ~ N(0, Id) once, then emits
/// X_t = Y_{D_t} + (G^{b_t}_{D_t} - mean G_{D_t}) where b_t counts visits.
/// Emission stops before the first step that would visit some coordinate for
/// the (M+1)-th time, or when the schedule runs out.
std::vector<CloneObservation> sgc_stream(std::span<const double> mu, const CloneSchedule& schedule,
                                         std::size_t budget, Rng& rng);

}  // namespace stpca
