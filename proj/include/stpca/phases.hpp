#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "stpca/model.hpp"
#include "stpca/search.hpp"

namespace stpca {

/// f = n^{(2a - 3) / (4 (r - 1))} with a = ln k / ln n.
double phase_line(std::size_t n, std::size_t k, int r);

/// Cosine change of one sign flip on sign vectors: 2 / sqrt(k n).
double flip_tolerance(std::size_t n, std::size_t k);

struct PhaseClassification {
    /// First index with |cos| >= line.
    std::optional<std::size_t> crossing_index;
    /// After the crossing, |cos| never falls more than the tolerance below
    /// its running maximum. False when there is no crossing.
    bool monotone_after = false;
};

PhaseClassification classify_phases(std::span<const double> abs_cos, double line, double tolerance);

/// Exponent a of the predicted threshold lambda = n^a, from
/// lambda ~ sqrt(k) / cos(S_1, theta)^{r-1} with k = n^{alpha_k}.
double predicted_threshold(InitKind init, double alpha_k, int r);
/// Same with alpha_k = ln k / ln n.
double predicted_threshold(InitKind init, const ProblemParams& params);

}  // namespace stpca
