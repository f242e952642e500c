#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "stpca/evaluator.hpp"
#include "stpca/hamiltonian.hpp"
#include "stpca/model.hpp"
#include "stpca/rng.hpp"
#include "stpca/sgc.hpp"

namespace stpca {

enum class AlgorithmKind {
    GreedySparse,
    RandGreedySparse,
    GreedyPeel,
    RandGreedyBinaryConstrained,
    RandGreedyBinary,
    RandGreedyTrinary,
    RandGreedySignFlip,
    ThresholdedSignFlip,
    ThresholdedTrinary,
    TwoStageBinary,
    TwoStageTrinary,
};
std::string_view to_string(AlgorithmKind kind);
AlgorithmKind parse_algorithm(std::string_view text);

enum class InitKind { AllOnes, UniformKSparse, UniformTrinary, UniformSignVector, Homotopy, PlantedPair, Custom };
std::string_view to_string(InitKind kind);
InitKind parse_init(std::string_view text);

struct InitSpec {
    InitKind kind = InitKind::AllOnes;
    /// Only read when kind == Custom.
    std::vector<Spin> custom;
};

struct AlgorithmSpec {
    AlgorithmKind kind = AlgorithmKind::RandGreedyBinary;
    HamiltonianParams hp;
    /// Accepted-step, proposal or threshold budget, depending on kind.
    std::size_t m = 0;
    /// Two-stage budgets.
    std::size_t m1 = 0;
    std::size_t m2 = 0;
    bool lazy = false;
    /// Support bound for the norm-constrained search.
    std::optional<std::size_t> norm_cap;
    /// Two-stage trinary without thresholds (sign flip then trinary).
    bool unthresholded = false;
};

enum class Recovery { Exact, SignFlip, Failed };
std::string_view to_string(Recovery r);

enum class FailureReason { BudgetExhausted, ThresholdOverflow, LocalMaxNotTheta };
std::string_view to_string(FailureReason f);

/// Why the main loop stopped.
enum class Termination {
    /// The algorithm's own budget was used up.
    Completed,
    /// No neighbor can be accepted any more.
    LocalMax,
    /// The 100x proposal cap of an accepted-step budget was hit.
    ProposalCap,
    /// A coordinate needed more than M thresholds.
    ThresholdOverflow,
};
std::string_view to_string(Termination t);

/// One proposal as seen by a trace sink, after the accept decision.
/// Proposal indices start at 1.
struct ProposalEvent {
    std::uint64_t proposal_index = 0;
    std::uint64_t accepted_step_index = 0;
    std::size_t coordinate = 0;
    Spin proposed_value = 0;
    bool accepted = false;
    double energy = 0.0;
    const SearchState* state = nullptr;
};
using TraceSink = std::function<void(const ProposalEvent&)>;

struct SearchOptions {
    TraceSink trace;
    /// Instrumentation only: overlap and recovery are measured against it.
    const Signal* signal = nullptr;
    Prior prior = Prior::Binary;
    /// Stop plain randomized searches early once a verified local maximum is
    /// reached. The final state is unchanged; only the count of wasted
    /// rejected proposals differs.
    bool stall_detection = true;
    /// Multiple of the accepted-step budget allowed as total proposals.
    std::size_t proposal_cap_factor = 100;
    /// Offsets added to reported indices (used to chain pipeline stages).
    std::uint64_t proposal_offset = 0;
    std::uint64_t accepted_offset = 0;
};

struct RunOutcome {
    SearchState final_state;
    std::uint64_t accepted_steps = 0;
    std::uint64_t proposals = 0;
    double final_energy = 0.0;
    Termination termination = Termination::Completed;
    Recovery recovered = Recovery::Failed;
    std::optional<FailureReason> failure_reason;
};

/// Neighborhoods used by the randomized searches.
enum class Neighborhood { Trinary, Binary, SignFlip };

/// Exact when sigma == theta; SignFlip when sigma == -theta, r is even and
/// the prior is Rademacher; Failed otherwise.
Recovery classify_recovery(std::span<const Spin> sigma, const Signal& theta, int r, Prior prior);

/// True iff no single-coordinate change in the trinary neighborhood strictly
/// increases H.
bool is_local_max(const DenseTensor& Y, const SearchState& sigma, const HamiltonianParams& hp);
/// Same over a restricted neighborhood; cap bounds the support of binary
/// neighbors when given.
bool is_local_max(const IncrementalEvaluator& ev, Neighborhood nb, std::optional<std::size_t> cap = std::nullopt);

/// (S)_i = sign(sum_{j_1..j_m} Y_{i,j_1,j_1,..,j_m,j_m}), m = (r-1)/2, sign(0) = +1.
SearchState homotopy_init(const DenseTensor& Y);

/// Builds an initial state; PlantedPair reads theta (pair drawn uniformly
/// from its support, with theta's signs).
SearchState make_init(const InitSpec& spec, const DenseTensor& Y, const Signal& theta, Rng& rng);

/// Steepest ascent on H_{r,gamma} over the trinary neighborhood.
RunOutcome greedy_sparse(const DenseTensor& Y, SearchState init, double gamma, const SearchOptions& opt = {});

/// Randomized greedy on H_{r,gamma}; M counts accepted steps (M - 1 moves).
RunOutcome rand_greedy_sparse(const DenseTensor& Y, SearchState init, double gamma, std::size_t m, Rng& proposals,
                              const SearchOptions& opt = {});

struct PairEnumeration {
    RunOutcome best;
    std::size_t runs = 0;
    /// Every run ended in the same state.
    bool outputs_agree = true;
};
/// Greedy from every 2-sparse start (both signs for Rademacher, +1 only for
/// binary) keeping the highest-energy output.
PairEnumeration enumerate_planted_pairs(const DenseTensor& Y, double gamma, Prior prior, const SearchOptions& opt = {});
/// 2-sparse starts in enumeration order.
std::vector<std::vector<Spin>> planted_pair_starts(std::size_t n, Prior prior);

/// Called after each peeling removal with the active set and the maintained scores.
using PeelObserver = std::function<void(const SearchState& active, std::span<const double> scores)>;
/// Greedy peeling of max(Y, 0) from the all-ones vector down to ceil(3k/2) coordinates.
SearchState greedy_peel(const DenseTensor& Y, std::size_t k, const PeelObserver& observer = {});

std::size_t norm_cap(std::size_t k);

/// Randomized greedy on H_{(r+1)/2,gamma} over {0,1}^n with ||S||_0 <= cap.
RunOutcome rand_greedy_binary_constrained(const DenseTensor& Y, SearchState init, double gamma, std::size_t m,
                                          std::size_t cap, Rng& proposals, const SearchOptions& opt = {});
/// Unconstrained binary version.
RunOutcome rand_greedy_binary(const DenseTensor& Y, SearchState init, double gamma, std::size_t m, Rng& proposals,
                              const SearchOptions& opt = {});
/// Trinary version.
RunOutcome rand_greedy_trinary(const DenseTensor& Y, SearchState init, double gamma, std::size_t m, Rng& proposals,
                               const SearchOptions& opt = {});
/// Sign-flip randomized greedy on H_{(r+1)/2,0}; M counts proposals.
RunOutcome rand_greedy_signflip(const DenseTensor& Y, SearchState init, std::size_t m, Rng& proposals,
                                const SearchOptions& opt = {});

/// Sign flips accepted iff dH > V * Z, stopping before any coordinate would
/// need its (M+1)-th threshold.
RunOutcome thresholded_signflip(const DenseTensor& Y, SearchState init, ThresholdBank bank, Rng& proposals,
                                const SearchOptions& opt = {});
/// Trinary moves accepted iff dH > V * Z over ceil(M n / 2) proposals; fails
/// with ThresholdOverflow when a cursor would exceed M. With lazy set the new
/// value is uniform over {-1,0,1} and self-proposals are rejected.
RunOutcome thresholded_trinary(const DenseTensor& Y, SearchState init, double gamma, ThresholdBank bank,
                               Rng& proposals, bool lazy = false, const SearchOptions& opt = {});

struct TwoStageStreams {
    Rng& first_thresholds;
    Rng& first_proposals;
    Rng& second_thresholds;
    Rng& second_proposals;
};
/// Homotopy init, sign-flip stage (M1), then trinary stage (M2, gamma).
RunOutcome two_stage_trinary(const DenseTensor& Y, std::size_t m1, std::size_t m2, double gamma, bool unthresholded,
                             bool lazy, TwoStageStreams streams, const SearchOptions& opt = {});
/// Peel (or all-ones when ceil(3k/2) >= n) then the norm-constrained search.
RunOutcome two_stage_binary(const DenseTensor& Y, std::size_t k, double gamma, std::size_t m, Rng& proposals,
                            const SearchOptions& opt = {});

}  // namespace stpca
