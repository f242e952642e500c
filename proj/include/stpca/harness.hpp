#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stpca/config.hpp"
#include "stpca/search.hpp"

namespace stpca {

/// One trace.csv row. The row with proposal_index 0 is the initial state and
/// has no coordinate.
struct TraceRow {
    std::uint64_t run_id = 0;
    std::uint64_t proposal_index = 0;
    std::uint64_t accepted_step_index = 0;
    std::optional<std::size_t> coordinate;
    std::optional<int> proposed_value;
    bool accepted = false;
    double cos = 0.0;
    double abs_cos = 0.0;
    long overlap = 0;
    std::size_t support_size = 0;
    std::size_t hamming_to_signal = 0;
    double energy = 0.0;
};

/// One summary.csv row plus run diagnostics that are not written.
struct SummaryRow {
    std::uint64_t run_id = 0;
    std::size_t n = 0;
    std::size_t k = 0;
    int r = 0;
    Prior prior = Prior::Binary;
    double alpha = 0.0;
    double lambda = 0.0;
    double gamma = 0.0;
    std::size_t m = 0;
    std::size_t m1 = 0;
    std::size_t m2 = 0;
    InitKind init = InitKind::AllOnes;
    AlgorithmKind algorithm = AlgorithmKind::RandGreedyBinary;
    Recovery recovered = Recovery::Failed;
    double final_abs_cos = 0.0;
    std::uint64_t accepted_steps = 0;
    std::uint64_t proposals = 0;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;

    Termination termination = Termination::Completed;
    std::optional<FailureReason> failure_reason;
    long final_overlap = 0;
    std::size_t final_support = 0;
};

struct RunOptions {
    unsigned workers = 1;
    /// Rows kept per run in decimated mode.
    std::size_t decimate_limit = 100000;
    /// When false, wall_seconds is written as 0 so outputs are byte-stable.
    bool record_wall_time = true;
};

struct RunResult {
    SummaryRow summary;
    std::vector<TraceRow> trace;
    RunOutcome outcome;
    Signal theta;
};

/// run_id = point * replications + replication.
std::size_t run_count(const ExperimentConfig& cfg);

/// Builds a fresh instance for run_id and runs the configured algorithm.
RunResult run_single(const ExperimentConfig& cfg, std::uint64_t run_id, const RunOptions& opt = {});

/// Runs every (lambda point, replication) on a worker pool and hands results
/// to `sink` in increasing run_id order, whatever the completion order.
void run_experiment(const ExperimentConfig& cfg, const RunOptions& opt, const std::function<void(RunResult&&)>& sink);

struct ExperimentResult {
    std::vector<SummaryRow> summaries;
    std::vector<TraceRow> traces;
};
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// Streams trace.csv and summary.csv into `dir`.
void run_experiment_to_files(const ExperimentConfig& cfg, const RunOptions& opt, const std::filesystem::path& dir);

inline constexpr const char* kTraceHeader =
    "run_id,proposal_index,accepted_step_index,coordinate,proposed_value,accepted,cos,abs_cos,overlap,support_size,"
    "hamming_to_signal,energy";
inline constexpr const char* kSummaryHeader =
    "run_id,n,k,r,prior,alpha,lambda,gamma,m,m1,m2,init,algorithm,recovered,final_abs_cos,accepted_steps,proposals,"
    "wall_seconds,seed";

std::string format_trace_row(const TraceRow& row);
std::string format_summary_row(const SummaryRow& row);
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows, bool header = true);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, bool header = true);

/// Keeps the first and last rows, every accepted row, and a uniform stride of
/// the rest, doubling the stride whenever more than `limit` rows are held.
class TraceDecimator {
public:
    explicit TraceDecimator(std::size_t limit) : limit_(limit) {}
    void push(const TraceRow& row);
    std::vector<TraceRow> finish();
    [[nodiscard]] std::uint64_t stride() const noexcept { return stride_; }

private:
    void compact();
    std::size_t limit_;
    std::uint64_t stride_ = 1;
    std::vector<TraceRow> rows_;
    std::optional<TraceRow> last_;
};

}  // namespace stpca
