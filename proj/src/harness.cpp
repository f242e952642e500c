#include "stpca/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "stpca/errors.hpp"

namespace stpca {

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

TraceRow row_from_state(std::uint64_t run_id, const SearchState& s, double energy) {
    TraceRow row;
    row.run_id = run_id;
    row.cos = s.cosine();
    row.abs_cos = std::abs(row.cos);
    row.overlap = s.overlap();
    row.support_size = s.support_size();
    row.hamming_to_signal = s.hamming_to_signal();
    row.energy = energy;
    return row;
}

class TraceCollector {
public:
    TraceCollector(std::uint64_t run_id, TraceMode mode, std::size_t limit)
        : run_id_(run_id), mode_(mode), decimator_(limit) {}

    void push(TraceRow row) {
        if (mode_ == TraceMode::Full) full_.push_back(std::move(row));
        else if (mode_ == TraceMode::Decimated) decimator_.push(row);
    }

    void on_event(const ProposalEvent& e) {
        TraceRow row = row_from_state(run_id_, *e.state, e.energy);
        row.proposal_index = e.proposal_index;
        row.accepted_step_index = e.accepted_step_index;
        row.coordinate = e.coordinate;
        row.proposed_value = e.proposed_value;
        row.accepted = e.accepted;
        push(std::move(row));
    }

    TraceSink sink() {
        if (mode_ == TraceMode::Off) return nullptr;
        return [this](const ProposalEvent& e) { on_event(e); };
    }

    std::vector<TraceRow> finish() {
        if (mode_ == TraceMode::Full) return std::move(full_);
        if (mode_ == TraceMode::Decimated) return decimator_.finish();
        return {};
    }

private:
    std::uint64_t run_id_;
    TraceMode mode_;
    TraceDecimator decimator_;
    std::vector<TraceRow> full_;
};

std::size_t gamma_budget(const AlgorithmSpec& a) {
    return a.kind == AlgorithmKind::TwoStageTrinary ? a.m2 : a.m;
}

bool uses_init(AlgorithmKind kind) {
    return kind != AlgorithmKind::GreedyPeel && kind != AlgorithmKind::TwoStageBinary &&
           kind != AlgorithmKind::TwoStageTrinary;
}

}  // namespace

void TraceDecimator::push(const TraceRow& row) {
    last_ = row;
    const bool keep = rows_.empty() || row.accepted || row.proposal_index % stride_ == 0;
    if (!keep) return;
    rows_.push_back(row);
    if (rows_.size() > limit_) compact();
}

void TraceDecimator::compact() {
    // accepted rows are never dropped, so only strided rows count toward the limit
    for (;;) {
        std::size_t strided = 0;
        for (const TraceRow& r : rows_) strided += !r.accepted;
        if (strided <= limit_ / 2 || stride_ > (std::uint64_t{1} << 62)) break;
        stride_ *= 2;
        std::vector<TraceRow> kept;
        kept.reserve(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (i == 0 || rows_[i].accepted || rows_[i].proposal_index % stride_ == 0) kept.push_back(rows_[i]);
        rows_ = std::move(kept);
    }
    if (rows_.size() > limit_) limit_ = rows_.size() * 2;
}

std::vector<TraceRow> TraceDecimator::finish() {
    if (last_ && (rows_.empty() || rows_.back().proposal_index != last_->proposal_index)) rows_.push_back(*last_);
    last_.reset();
    return std::move(rows_);
}

std::size_t run_count(const ExperimentConfig& cfg) { return cfg.points() * cfg.replications; }

RunResult run_single(const ExperimentConfig& cfg, std::uint64_t run_id, const RunOptions& opt) {
    const std::size_t point = run_id / cfg.replications;
    if (point >= cfg.points()) throw InvalidParameters("run_id out of range");
    ProblemParams params = cfg.params;
    params.k = cfg.k();
    params.lambda = cfg.lambda_at(point);
    const std::size_t n = params.n;
    const AlgorithmSpec& alg = cfg.algorithm;
    const double gamma = cfg.gamma_rule.evaluate(n, gamma_budget(alg));
    const std::uint64_t seed = cfg.seed;

    RunResult result;
    Rng signal_rng(seed, run_id, StreamPurpose::Signal);
    Rng noise_rng(seed, run_id, StreamPurpose::Noise);
    Rng init_rng(seed, run_id, StreamPurpose::Init);
    Rng proposals(seed, run_id, StreamPurpose::Proposals);
    Rng thresholds(seed, run_id, StreamPurpose::Thresholds);
    Rng thresholds2(seed, run_id, StreamPurpose::SecondStageThresholds);
    Rng proposals2(seed, run_id, StreamPurpose::SecondStageProposals);

    result.theta = sample_signal(params, signal_rng);
    const Observation obs = build_observation(result.theta, params, noise_rng, NoiseSource::Gaussian, seed);
    const DenseTensor& Y = obs.tensor;

    TraceCollector traces(run_id, cfg.trace, opt.decimate_limit);
    SearchOptions so;
    so.trace = traces.sink();
    so.signal = &result.theta;
    so.prior = params.prior;

    const auto start = std::chrono::steady_clock::now();
    std::optional<SearchState> init;
    if (uses_init(alg.kind)) {
        init = make_init(cfg.init, Y, result.theta, init_rng);
        init->attach_signal(result.theta.values);
        if (cfg.trace != TraceMode::Off) {
            const HamiltonianParams hp{alg.kind == AlgorithmKind::GreedySparse ||
                                               alg.kind == AlgorithmKind::RandGreedySparse
                                           ? static_cast<double>(params.r)
                                           : (params.r + 1) / 2.0,
                                       alg.kind == AlgorithmKind::RandGreedySignFlip ||
                                               alg.kind == AlgorithmKind::ThresholdedSignFlip
                                           ? 0.0
                                           : gamma};
            traces.push(row_from_state(run_id, *init, energy(Y, *init, hp)));
        }
    }

    RunOutcome out;
    switch (alg.kind) {
        case AlgorithmKind::GreedySparse: out = greedy_sparse(Y, std::move(*init), gamma, so); break;
        case AlgorithmKind::RandGreedySparse:
            out = rand_greedy_sparse(Y, std::move(*init), gamma, alg.m, proposals, so);
            break;
        case AlgorithmKind::GreedyPeel: {
            std::uint64_t removals = 0;
            std::vector<Spin> previous(n, 1);
            const HamiltonianParams hp{HamiltonianParams::kInfiniteBeta, 0.0};
            PeelObserver observer;
            if (so.trace) {
                SearchState start_state(std::vector<Spin>(n, 1), result.theta.values);
                traces.push(row_from_state(run_id, start_state, energy(Y, start_state, hp)));
                observer = [&](const SearchState& active, std::span<const double>) {
                    ++removals;
                    std::size_t removed = 0;
                    for (std::size_t i = 0; i < n; ++i)
                        if (previous[i] != active[i]) removed = i;
                    previous.assign(active.values().begin(), active.values().end());
                    SearchState tracked(previous, result.theta.values);
                    TraceRow row = row_from_state(run_id, tracked, energy(Y, tracked, hp));
                    row.proposal_index = removals;
                    row.accepted_step_index = removals;
                    row.coordinate = removed;
                    row.proposed_value = 0;
                    row.accepted = true;
                    traces.push(std::move(row));
                };
            }
            SearchState p = greedy_peel(Y, params.k, observer);
            p.attach_signal(result.theta.values);
            out.accepted_steps = out.proposals = n - norm_cap(params.k);
            out.final_energy = energy(Y, p, hp);
            out.recovered = classify_recovery(p.values(), result.theta, params.r, params.prior);
            out.termination = Termination::Completed;
            if (out.recovered == Recovery::Failed) out.failure_reason = FailureReason::BudgetExhausted;
            out.final_state = std::move(p);
            break;
        }
        case AlgorithmKind::RandGreedyBinaryConstrained: {
            const std::size_t cap = std::min(n, alg.norm_cap.value_or(norm_cap(params.k)));
            out = rand_greedy_binary_constrained(Y, std::move(*init), gamma, alg.m, cap, proposals, so);
            break;
        }
        case AlgorithmKind::RandGreedyBinary:
            out = rand_greedy_binary(Y, std::move(*init), gamma, alg.m, proposals, so);
            break;
        case AlgorithmKind::RandGreedyTrinary:
            out = rand_greedy_trinary(Y, std::move(*init), gamma, alg.m, proposals, so);
            break;
        case AlgorithmKind::RandGreedySignFlip:
            out = rand_greedy_signflip(Y, std::move(*init), alg.m, proposals, so);
            break;
        case AlgorithmKind::ThresholdedSignFlip:
            out = thresholded_signflip(Y, std::move(*init), generate_thresholds(n, alg.m, thresholds), proposals, so);
            break;
        case AlgorithmKind::ThresholdedTrinary:
            out = thresholded_trinary(Y, std::move(*init), gamma, generate_thresholds(n, alg.m, thresholds),
                                      proposals, alg.lazy, so);
            break;
        case AlgorithmKind::TwoStageBinary:
            out = two_stage_binary(Y, params.k, gamma, alg.m, proposals, so);
            break;
        case AlgorithmKind::TwoStageTrinary:
            out = two_stage_trinary(Y, alg.m1, alg.m2, gamma, alg.unthresholded, alg.lazy,
                                    {thresholds, proposals, thresholds2, proposals2}, so);
            break;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    SummaryRow& s = result.summary;
    s.run_id = run_id;
    s.n = n;
    s.k = params.k;
    s.r = params.r;
    s.prior = params.prior;
    s.alpha = cfg.alpha_at(point);
    s.lambda = params.lambda;
    s.gamma = gamma;
    s.m = alg.m;
    s.m1 = alg.m1;
    s.m2 = alg.m2;
    s.init = cfg.init.kind;
    s.algorithm = alg.kind;
    s.recovered = out.recovered;
    s.final_abs_cos = std::abs(out.final_state.cosine());
    s.accepted_steps = out.accepted_steps;
    s.proposals = out.proposals;
    s.wall_seconds = opt.record_wall_time ? seconds : 0.0;
    s.seed = seed;
    s.termination = out.termination;
    s.failure_reason = out.failure_reason;
    s.final_overlap = out.final_state.overlap();
    s.final_support = out.final_state.support_size();
    result.trace = traces.finish();
    result.outcome = std::move(out);
    return result;
}

void run_experiment(const ExperimentConfig& cfg, const RunOptions& opt, const std::function<void(RunResult&&)>& sink) {
    cfg.validate();
    const std::size_t total = run_count(cfg);
    const unsigned workers = std::max(1u, std::min<unsigned>(opt.workers, static_cast<unsigned>(total)));
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::map<std::size_t, RunResult> pending;
    std::size_t next_emit = 0;
    std::exception_ptr error;

    auto work = [&] {
        for (;;) {
            const std::size_t id = next.fetch_add(1);
            if (id >= total) return;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (error) return;
            }
            try {
                RunResult r = run_single(cfg, id, opt);
                std::lock_guard<std::mutex> lock(mu);
                pending.emplace(id, std::move(r));
                while (!pending.empty() && pending.begin()->first == next_emit) {
                    sink(std::move(pending.begin()->second));
                    pending.erase(pending.begin());
                    ++next_emit;
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    ExperimentResult out;
    run_experiment(cfg, opt, [&](RunResult&& r) {
        out.summaries.push_back(r.summary);
        out.traces.insert(out.traces.end(), r.trace.begin(), r.trace.end());
    });
    return out;
}

void run_experiment_to_files(const ExperimentConfig& cfg, const RunOptions& opt, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream trace(dir / "trace.csv");
    std::ofstream summary(dir / "summary.csv");
    if (!trace || !summary) throw std::runtime_error("cannot write outputs in " + dir.string());
    trace << kTraceHeader << '\n';
    summary << kSummaryHeader << '\n';
    run_experiment(cfg, opt, [&](RunResult&& r) {
        for (const TraceRow& row : r.trace) trace << format_trace_row(row) << '\n';
        summary << format_summary_row(r.summary) << '\n';
    });
}

std::string format_trace_row(const TraceRow& row) {
    std::string s;
    s += std::to_string(row.run_id) + ',' + std::to_string(row.proposal_index) + ',' +
         std::to_string(row.accepted_step_index) + ',';
    s += (row.coordinate ? std::to_string(*row.coordinate) : std::string()) + ',';
    s += (row.proposed_value ? std::to_string(*row.proposed_value) : std::string()) + ',';
    s += std::string(row.accepted ? "1" : "0") + ',' + fmt_double(row.cos) + ',' + fmt_double(row.abs_cos) + ',' +
         std::to_string(row.overlap) + ',' + std::to_string(row.support_size) + ',' +
         std::to_string(row.hamming_to_signal) + ',' + fmt_double(row.energy);
    return s;
}

std::string format_summary_row(const SummaryRow& r) {
    std::string s;
    s += std::to_string(r.run_id) + ',' + std::to_string(r.n) + ',' + std::to_string(r.k) + ',' +
         std::to_string(r.r) + ',' + std::string(to_string(r.prior)) + ',' + fmt_double(r.alpha) + ',' +
         fmt_double(r.lambda) + ',' + fmt_double(r.gamma) + ',' + std::to_string(r.m) + ',' + std::to_string(r.m1) +
         ',' + std::to_string(r.m2) + ',' + std::string(to_string(r.init)) + ',' +
         std::string(to_string(r.algorithm)) + ',' + std::string(to_string(r.recovered)) + ',' +
         fmt_double(r.final_abs_cos) + ',' + std::to_string(r.accepted_steps) + ',' + std::to_string(r.proposals) +
         ',' + fmt_double(r.wall_seconds) + ',' + std::to_string(r.seed);
    return s;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows, bool header) {
    if (header) out << kTraceHeader << '\n';
    for (const TraceRow& r : rows) out << format_trace_row(r) << '\n';
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, bool header) {
    if (header) out << kSummaryHeader << '\n';
    for (const SummaryRow& r : rows) out << format_summary_row(r) << '\n';
}

}  // namespace stpca
