#include "stpca/phases.hpp"

#include <algorithm>
#include <cmath>

#include "stpca/errors.hpp"

namespace stpca {

double phase_line(std::size_t n, std::size_t k, int r) {
    if (r < 2) throw InvalidParameters("phase line needs r >= 2");
    if (n < 2 || k < 1 || k > n) throw InvalidParameters("phase line needs 1 <= k <= n and n >= 2");
    const double ln_n = std::log(static_cast<double>(n));
    const double a = std::log(static_cast<double>(k)) / ln_n;
    return std::exp(ln_n * (2.0 * a - 3.0) / (4.0 * (r - 1)));
}

double flip_tolerance(std::size_t n, std::size_t k) {
    return 2.0 / std::sqrt(static_cast<double>(k) * static_cast<double>(n));
}

PhaseClassification classify_phases(std::span<const double> abs_cos, double line, double tolerance) {
    PhaseClassification out;
    const auto it = std::find_if(abs_cos.begin(), abs_cos.end(), [&](double c) { return c >= line; });
    if (it == abs_cos.end()) return out;
    out.crossing_index = static_cast<std::size_t>(it - abs_cos.begin());
    constexpr double kSlack = 1e-12;
    double running_max = *it;
    out.monotone_after = true;
    for (auto p = it; p != abs_cos.end(); ++p) {
        if (*p < running_max - tolerance - kSlack) {
            out.monotone_after = false;
            break;
        }
        running_max = std::max(running_max, *p);
    }
    return out;
}

double predicted_threshold(InitKind init, double alpha_k, int r) {
    // exponent of cos(S_1, theta) in base n
    double c = 0.0;
    switch (init) {
        case InitKind::AllOnes: c = (alpha_k - 1.0) / 2.0; break;
        case InitKind::UniformKSparse: c = alpha_k - 1.0; break;
        case InitKind::UniformTrinary:
        case InitKind::UniformSignVector: c = -0.5; break;
        case InitKind::Homotopy: c = -0.25; break;
        case InitKind::PlantedPair: c = -alpha_k / 2.0; break;
        case InitKind::Custom: throw InvalidParameters("no threshold prediction for a custom init");
    }
    return alpha_k / 2.0 - (r - 1) * c;
}

double predicted_threshold(InitKind init, const ProblemParams& params) {
    params.validate();
    if (params.n < 2) throw InvalidParameters("threshold prediction needs n >= 2");
    const double alpha_k = std::log(static_cast<double>(params.k)) / std::log(static_cast<double>(params.n));
    return predicted_threshold(init, alpha_k, params.r);
}

}  // namespace stpca
