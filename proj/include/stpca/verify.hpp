#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "stpca/model.hpp"
#include "stpca/tensor.hpp"

namespace stpca {

enum class VerifySuite { Delta, Rank1, Frobenius, Sgc, Exhaustive, All };
VerifySuite parse_verify_suite(std::string_view text);
std::string_view to_string(VerifySuite suite);

struct VerifyOptions {
    std::uint64_t seed = 7;
    /// Negative control: flips the sign of the kernel delta before comparing.
    bool inject_delta_bug = false;
    std::size_t delta_cases = 1000;
    std::size_t sgc_trials = 20000;
    std::size_t sgc_budget = 50;
};

struct SuiteReport {
    std::string name;
    bool passed = true;
    std::vector<std::string> lines;
};

struct VerifyReport {
    std::vector<SuiteReport> suites;
    [[nodiscard]] bool passed() const;
};

VerifyReport verify(VerifySuite suite, const VerifyOptions& opt = {});
void print_report(std::ostream& out, const VerifyReport& report);

/// Empirical law of a singleton clone schedule that visits coordinate 0 of an
/// N = 4 mean vector M times, over independent trials.
struct SgcLaw {
    std::size_t budget = 0;
    std::size_t trials = 0;
    double mu = 0.0;
    std::vector<double> step_mean;
    std::vector<double> step_variance;
    /// Largest |correlation| over all step pairs t < t'.
    double max_abs_correlation = 0.0;
    std::size_t pairs = 0;
    /// Per-step KS p-values of (X_t - mu) / sqrt(M) against N(0, 1).
    std::vector<double> ks_p_value;
    std::size_t emitted_steps = 0;
};
SgcLaw measure_sgc_law(std::size_t budget, std::size_t trials, double mu, std::uint64_t seed);

/// <sigma^{(x)r}, Y> by a full loop over all n^r entries.
double brute_force_inner(const DenseTensor& Y, std::span<const Spin> sigma);

}  // namespace stpca
