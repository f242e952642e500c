#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stpca/model.hpp"
#include "stpca/search.hpp"

namespace stpca {

enum class GammaKind { SqrtLog, Log, Const, LemmaA };
std::string_view to_string(GammaKind kind);

/// gamma = scale * sqrt(ln n), scale * ln n, value, or 2 (M2 ln(M2 n))^{1/2} + 1.
struct GammaRule {
    GammaKind kind = GammaKind::SqrtLog;
    double scale = 1.0;
    double value = 0.0;
    [[nodiscard]] double evaluate(std::size_t n, std::size_t m2) const;
};

enum class TraceMode { Full, Decimated, Off };
std::string_view to_string(TraceMode mode);
TraceMode parse_trace_mode(std::string_view text);

struct ExperimentConfig {
    /// params.lambda is ignored; each run uses lambda_prefactor * n^alpha.
    ProblemParams params;
    /// When set, k = ceil(n^alpha_k) overrides params.k.
    std::optional<double> alpha_k;
    std::vector<double> alphas;
    /// Explicit lambda values used instead of n^alpha (alpha is then reported as ln lambda / ln n).
    std::vector<double> lambdas;
    double lambda_prefactor = 1.0;
    GammaRule gamma_rule;
    AlgorithmSpec algorithm;
    InitSpec init;
    std::size_t replications = 1;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";
    TraceMode trace = TraceMode::Decimated;

    /// Resolved sparsity.
    [[nodiscard]] std::size_t k() const;
    /// Number of lambda points.
    [[nodiscard]] std::size_t points() const { return lambdas.empty() ? alphas.size() : lambdas.size(); }
    [[nodiscard]] double lambda_at(std::size_t point) const;
    [[nodiscard]] double alpha_at(std::size_t point) const;
    /// Throws ConfigError on any inconsistency.
    void validate() const;
};

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace stpca
