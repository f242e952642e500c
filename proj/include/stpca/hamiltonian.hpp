#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "stpca/model.hpp"
#include "stpca/tensor.hpp"

namespace stpca {

/// H_{beta,gamma}(sigma) = <sigma^{(x)r}, Y> - gamma * ||sigma||_0^beta.
struct HamiltonianParams {
    /// Use +infinity for the hard-constraint regulariser.
    double beta = 2.0;
    double gamma = 0.0;

    static constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();
    [[nodiscard]] bool infinite_beta() const noexcept { return beta == kInfiniteBeta; }
    void validate() const;
};

/// Change coordinate `coordinate` to `new_value`.
struct Move {
    std::size_t coordinate = 0;
    Spin new_value = 0;
};

/// Iterate sigma in {-1,0,1}^n with cached support size.
///
/// When constructed with a signal it also caches <sigma, theta> and the
/// Hamming distance to theta. Those caches are instrumentation; no search
/// decision reads them.
class SearchState {
public:
    SearchState() = default;
    explicit SearchState(std::vector<Spin> values);
    SearchState(std::vector<Spin> values, std::span<const Spin> signal);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] Spin operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] std::span<const Spin> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t support_size() const noexcept { return support_size_; }

    [[nodiscard]] bool tracks_signal() const noexcept { return static_cast<bool>(signal_); }
    /// <sigma, theta>; requires tracks_signal().
    [[nodiscard]] long overlap() const;
    [[nodiscard]] std::size_t hamming_to_signal() const;
    /// cos(sigma, theta); 0 when sigma = 0.
    [[nodiscard]] double cosine() const;

    /// Start (or restart) tracking overlap against `signal`.
    void attach_signal(std::span<const Spin> signal);

    void apply(const Move& mv);

    [[nodiscard]] bool is_binary() const noexcept;
    [[nodiscard]] bool is_sign_vector() const noexcept;

    friend bool operator==(const SearchState& a, const SearchState& b) { return a.values_ == b.values_; }

private:
    void check_invariants() const;

    std::vector<Spin> values_;
    std::size_t support_size_ = 0;
    std::shared_ptr<const std::vector<Spin>> signal_;
    long overlap_ = 0;
    std::size_t hamming_ = 0;
    std::size_t signal_support_ = 0;
};

/// Penalty change gamma * (after^beta - before^beta). With infinite beta the
/// change is +infinity for any support increase and 0 otherwise.
double penalty_change(std::size_t support_before, std::size_t support_after, const HamiltonianParams& hp);

/// H_{beta,gamma}(sigma), summing Y over supp(sigma)^r (cost ||sigma||_0^r).
/// With infinite beta the penalty is a constraint, not a value: only the inner
/// product is returned.
double energy(const DenseTensor& Y, const SearchState& sigma, const HamiltonianParams& hp);
double energy(const Observation& Y, const SearchState& sigma, const HamiltonianParams& hp);

/// <sigma^{(x)r}, Y>.
double inner_product(const DenseTensor& Y, std::span<const Spin> sigma);

/// <(sigma + a e_i)^{(x)r} - sigma^{(x)r}, Y> with a = q - sigma_i.
///
/// Exact for non-symmetric Y: sums a^{|S|} <v_1 (x) ... (x) v_r, Y> over all
/// nonempty slot subsets S, with v_m = e_i on S and sigma elsewhere.
double delta_inner(const DenseTensor& Y, const SearchState& sigma, const Move& mv);
double delta_inner(const Observation& Y, const SearchState& sigma, const Move& mv);

/// delta_inner - penalty_change.
double delta_energy(const DenseTensor& Y, const SearchState& sigma, const Move& mv, const HamiltonianParams& hp);
double delta_energy(const Observation& Y, const SearchState& sigma, const Move& mv, const HamiltonianParams& hp);

/// ||(sigma + a e_i)^{(x)r} - sigma^{(x)r}||_F in closed form from
/// ||u||^{2r} - 2<u,sigma>^r + ||sigma||^{2r}, u = sigma + a e_i.
double diff_frobenius(const SearchState& sigma, const Move& mv, int r);

/// <u^{(x)r}, v^{(x)r}> = <u, v>^r.
double rank1_inner(std::span<const double> u, std::span<const double> v, int r);

/// <e_i (x) P^{(x)(r-1)}, Q> with i in the first slot only.
/// Throws InvalidState unless `active` is {0,1}-valued.
double peel_score(const DenseTensor& Q, const SearchState& active, std::size_t i);

}  // namespace stpca
