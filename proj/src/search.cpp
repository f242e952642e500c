#include "stpca/search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "stpca/contraction.hpp"
#include "stpca/errors.hpp"

namespace stpca {

namespace {

constexpr std::array<std::string_view, 11> kAlgorithmNames = {
    "greedy_sparse",       "rand_greedy_sparse",   "greedy_peel",          "rand_greedy_binary_constrained",
    "rand_greedy_binary",  "rand_greedy_trinary",  "rand_greedy_signflip", "thresholded_signflip",
    "thresholded_trinary", "two_stage_binary",     "two_stage_trinary",
};

constexpr std::array<std::string_view, 7> kInitNames = {
    "all_ones", "uniform_k_sparse", "uniform_trinary", "uniform_sign_vector", "homotopy", "planted_pair", "custom",
};

HamiltonianParams half_power(int r, double gamma) { return {(r + 1) / 2.0, gamma}; }

/// Shared bookkeeping for one search loop.
class Runner {
public:
    Runner(const DenseTensor& Y, SearchState init, HamiltonianParams hp, const SearchOptions& opt)
        : ev_(Y, attach(std::move(init), opt), hp), opt_(opt) {}

    IncrementalEvaluator& ev() { return ev_; }
    const SearchState& state() const { return ev_.state(); }
    std::size_t n() const { return ev_.dim(); }

    void record(std::size_t i, Spin q, bool accepted) {
        if (accepted) ++accepted_;
        ++proposals_;
        if (opt_.trace) {
            ProposalEvent e;
            e.proposal_index = opt_.proposal_offset + proposals_;
            e.accepted_step_index = opt_.accepted_offset + accepted_;
            e.coordinate = i;
            e.proposed_value = q;
            e.accepted = accepted;
            e.energy = ev_.energy();
            e.state = &ev_.state();
            opt_.trace(e);
        }
    }

    std::uint64_t proposals() const { return proposals_; }
    std::uint64_t accepted() const { return accepted_; }

    RunOutcome finish(Termination term, int r) {
        RunOutcome out;
        out.final_state = ev_.state();
        out.accepted_steps = accepted_;
        out.proposals = proposals_;
        out.final_energy = ev_.energy();
        out.termination = term;
        // Overflow and the proposal cap are failures whether or not a signal
        // is attached.
        if (term == Termination::ThresholdOverflow) out.failure_reason = FailureReason::ThresholdOverflow;
        if (term == Termination::ProposalCap) out.failure_reason = FailureReason::BudgetExhausted;
        if (opt_.signal) {
            out.failure_reason.reset();
            out.recovered = classify_recovery(out.final_state.values(), *opt_.signal, r, opt_.prior);
            if (out.recovered == Recovery::Failed) {
                switch (term) {
                    case Termination::ThresholdOverflow: out.failure_reason = FailureReason::ThresholdOverflow; break;
                    case Termination::LocalMax: out.failure_reason = FailureReason::LocalMaxNotTheta; break;
                    default: out.failure_reason = FailureReason::BudgetExhausted; break;
                }
            }
        }
        return out;
    }

private:
    static SearchState attach(SearchState s, const SearchOptions& opt) {
        if (opt.signal) s.attach_signal(opt.signal->values);
        return s;
    }

    IncrementalEvaluator ev_;
    const SearchOptions& opt_;
    std::uint64_t proposals_ = 0;
    std::uint64_t accepted_ = 0;
};

/// The two values in {-1,0,1} other than v, in increasing order.
std::array<Spin, 2> alternatives(Spin v) {
    if (v == -1) return {0, 1};
    if (v == 0) return {-1, 1};
    return {-1, 0};
}

Move draw_trinary(const SearchState& s, Rng& rng) {
    const std::uint64_t d = rng.below(2 * s.size());
    const std::size_t i = static_cast<std::size_t>(d >> 1);
    return {i, alternatives(s[i])[d & 1]};
}

Move draw_binary(const SearchState& s, Rng& rng) {
    const std::size_t i = static_cast<std::size_t>(rng.below(s.size()));
    return {i, static_cast<Spin>(1 - s[i])};
}

Move draw_signflip(const SearchState& s, Rng& rng) {
    const std::size_t i = static_cast<std::size_t>(rng.below(s.size()));
    return {i, static_cast<Spin>(-s[i])};
}

/// Uniform over binary neighbors whose support stays within cap (rejection sampling).
Move draw_binary_capped(const SearchState& s, std::size_t cap, Rng& rng) {
    for (;;) {
        const Move mv = draw_binary(s, rng);
        if (mv.new_value == 1 && s.support_size() >= cap) continue;
        return mv;
    }
}

/// Loop shared by the randomized greedy searches whose budget counts accepted
/// steps: runs while t < M with t incremented on acceptance.
Termination run_accepted_budget(Runner& run, Neighborhood nb, std::optional<std::size_t> cap, std::size_t m,
                                Rng& rng, const SearchOptions& opt) {
    const std::uint64_t proposal_cap = static_cast<std::uint64_t>(opt.proposal_cap_factor) * m;
    const std::uint64_t n = run.n();
    std::uint64_t t = 1;
    std::uint64_t rejections = 0;
    std::uint64_t next_check = n;
    while (t < m) {
        if (run.proposals() >= proposal_cap) return Termination::ProposalCap;
        Move mv;
        switch (nb) {
            case Neighborhood::Trinary: mv = draw_trinary(run.state(), rng); break;
            case Neighborhood::Binary:
                mv = cap ? draw_binary_capped(run.state(), *cap, rng) : draw_binary(run.state(), rng);
                break;
            case Neighborhood::SignFlip: mv = draw_signflip(run.state(), rng); break;
        }
        const bool accept = run.ev().delta_energy(mv.coordinate, mv.new_value) > 0.0;
        if (accept) {
            run.ev().commit(mv);
            ++t;
            rejections = 0;
            next_check = n;
        } else {
            ++rejections;
        }
        run.record(mv.coordinate, mv.new_value, accept);
        if (!accept && opt.stall_detection && rejections >= next_check) {
            if (is_local_max(run.ev(), nb, cap)) return Termination::LocalMax;
            next_check *= 2;
        }
    }
    return Termination::Completed;
}

void require_values(const SearchState& s, bool allow_zero, bool allow_negative, std::string_view what) {
    for (Spin v : s.values()) {
        if ((v == 0 && !allow_zero) || (v < 0 && !allow_negative))
            throw InvalidParameters(std::string(what) + ": initial state outside the search space");
    }
}

}  // namespace

std::string_view to_string(AlgorithmKind kind) { return kAlgorithmNames[static_cast<std::size_t>(kind)]; }

AlgorithmKind parse_algorithm(std::string_view text) {
    for (std::size_t i = 0; i < kAlgorithmNames.size(); ++i)
        if (kAlgorithmNames[i] == text) return static_cast<AlgorithmKind>(i);
    throw InvalidParameters("unknown algorithm '" + std::string(text) + "'");
}

std::string_view to_string(InitKind kind) { return kInitNames[static_cast<std::size_t>(kind)]; }

InitKind parse_init(std::string_view text) {
    for (std::size_t i = 0; i < kInitNames.size(); ++i)
        if (kInitNames[i] == text) return static_cast<InitKind>(i);
    throw InvalidParameters("unknown init '" + std::string(text) + "'");
}

std::string_view to_string(Recovery r) {
    switch (r) {
        case Recovery::Exact: return "exact";
        case Recovery::SignFlip: return "sign_flip";
        case Recovery::Failed: return "failed";
    }
    return "failed";
}

std::string_view to_string(FailureReason f) {
    switch (f) {
        case FailureReason::BudgetExhausted: return "budget_exhausted";
        case FailureReason::ThresholdOverflow: return "threshold_overflow";
        case FailureReason::LocalMaxNotTheta: return "local_max_not_theta";
    }
    return "";
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::Completed: return "completed";
        case Termination::LocalMax: return "local_max";
        case Termination::ProposalCap: return "proposal_cap";
        case Termination::ThresholdOverflow: return "threshold_overflow";
    }
    return "";
}

Recovery classify_recovery(std::span<const Spin> sigma, const Signal& theta, int r, Prior prior) {
    if (sigma.size() != theta.size()) throw InvalidState("state length differs from signal length");
    if (std::equal(sigma.begin(), sigma.end(), theta.values.begin())) return Recovery::Exact;
    if (r % 2 == 0 && prior == Prior::Rademacher) {
        bool negated = true;
        for (std::size_t i = 0; i < sigma.size() && negated; ++i) negated = sigma[i] == -theta.values[i];
        if (negated) return Recovery::SignFlip;
    }
    return Recovery::Failed;
}

bool is_local_max(const IncrementalEvaluator& ev, Neighborhood nb, std::optional<std::size_t> cap) {
    const SearchState& s = ev.state();
    for (std::size_t i = 0; i < s.size(); ++i) {
        switch (nb) {
            case Neighborhood::Trinary:
                for (Spin q : alternatives(s[i]))
                    if (ev.delta_energy(i, q) > 0.0) return false;
                break;
            case Neighborhood::Binary: {
                const Spin q = static_cast<Spin>(1 - s[i]);
                if (q == 1 && cap && s.support_size() >= *cap) break;
                if (ev.delta_energy(i, q) > 0.0) return false;
                break;
            }
            case Neighborhood::SignFlip:
                if (ev.delta_energy(i, static_cast<Spin>(-s[i])) > 0.0) return false;
                break;
        }
    }
    return true;
}

bool is_local_max(const DenseTensor& Y, const SearchState& sigma, const HamiltonianParams& hp) {
    const IncrementalEvaluator ev(Y, sigma, hp);
    return is_local_max(ev, Neighborhood::Trinary);
}

SearchState homotopy_init(const DenseTensor& Y) {
    const int r = Y.order();
    if (r % 2 == 0) throw UnsupportedOrder("homotopy initialization requires odd r");
    const std::size_t n = Y.dim();
    const int pairs = (r - 1) / 2;
    // stride of the pair (j, j) occupying slots 2m+1 and 2m+2
    std::vector<std::size_t> pair_stride(static_cast<std::size_t>(pairs));
    for (int m = 0; m < pairs; ++m) pair_stride[m] = Y.stride(2 * m + 1) + Y.stride(2 * m + 2);
    std::vector<Spin> values(n);
    std::vector<std::size_t> j(static_cast<std::size_t>(pairs));
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        std::fill(j.begin(), j.end(), 0);
        const std::size_t base = i * Y.stride(0);
        for (;;) {
            std::size_t flat = base;
            for (int m = 0; m < pairs; ++m) flat += j[m] * pair_stride[m];
            sum += Y[flat];
            int m = pairs - 1;
            while (m >= 0 && ++j[m] == n) j[m--] = 0;
            if (m < 0) break;
        }
        values[i] = sum >= 0.0 ? 1 : -1;
    }
    return SearchState(std::move(values));
}

SearchState make_init(const InitSpec& spec, const DenseTensor& Y, const Signal& theta, Rng& rng) {
    const std::size_t n = Y.dim();
    std::vector<Spin> v(n, 0);
    switch (spec.kind) {
        case InitKind::AllOnes: std::fill(v.begin(), v.end(), 1); break;
        case InitKind::UniformKSparse: {
            if (theta.k > n) throw InvalidParameters("k exceeds n");
            std::vector<std::size_t> idx(n);
            for (std::size_t i = 0; i < n; ++i) idx[i] = i;
            for (std::size_t m = 0; m < theta.k; ++m) {
                const std::size_t j = m + static_cast<std::size_t>(rng.below(n - m));
                std::swap(idx[m], idx[j]);
                v[idx[m]] = 1;
            }
            break;
        }
        case InitKind::UniformTrinary:
            for (Spin& x : v) x = static_cast<Spin>(static_cast<int>(rng.below(3)) - 1);
            break;
        case InitKind::UniformSignVector:
            for (Spin& x : v) x = rng.below(2) ? 1 : -1;
            break;
        case InitKind::Homotopy: return homotopy_init(Y);
        case InitKind::PlantedPair: {
            const std::vector<std::size_t> supp = theta.support();
            if (supp.size() < 2) throw InvalidParameters("planted pair init needs k >= 2");
            const std::size_t a = static_cast<std::size_t>(rng.below(supp.size()));
            std::size_t b = static_cast<std::size_t>(rng.below(supp.size() - 1));
            if (b >= a) ++b;
            v[supp[a]] = theta.values[supp[a]];
            v[supp[b]] = theta.values[supp[b]];
            break;
        }
        case InitKind::Custom:
            if (spec.custom.size() != n) throw InvalidParameters("custom init has the wrong length");
            for (Spin x : spec.custom)
                if (x < -1 || x > 1) throw InvalidParameters("custom init entries must be in {-1,0,1}");
            v = spec.custom;
            break;
    }
    return SearchState(std::move(v));
}

RunOutcome greedy_sparse(const DenseTensor& Y, SearchState init, double gamma, const SearchOptions& opt) {
    const int r = Y.order();
    Runner run(Y, std::move(init), {static_cast<double>(r), gamma}, opt);
    for (;;) {
        double best = 0.0;
        std::optional<Move> best_move;
        for (std::size_t i = 0; i < run.n(); ++i) {
            for (Spin q : alternatives(run.state()[i])) {
                const double d = run.ev().delta_energy(i, q);
                if (d > best) {
                    best = d;
                    best_move = Move{i, q};
                }
            }
        }
        if (!best_move) break;
        run.ev().commit(*best_move);
        run.record(best_move->coordinate, best_move->new_value, true);
    }
    return run.finish(Termination::LocalMax, r);
}

RunOutcome rand_greedy_sparse(const DenseTensor& Y, SearchState init, double gamma, std::size_t m, Rng& proposals,
                              const SearchOptions& opt) {
    const int r = Y.order();
    Runner run(Y, std::move(init), {static_cast<double>(r), gamma}, opt);
    const Termination term = run_accepted_budget(run, Neighborhood::Trinary, std::nullopt, m, proposals, opt);
    return run.finish(term, r);
}

std::vector<std::vector<Spin>> planted_pair_starts(std::size_t n, Prior prior) {
    static constexpr std::array<std::array<Spin, 2>, 4> kSigns = {{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
    std::vector<std::vector<Spin>> out;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (const auto& s : kSigns) {
                if (prior == Prior::Binary && (s[0] != 1 || s[1] != 1)) continue;
                std::vector<Spin> v(n, 0);
                v[i] = s[0];
                v[j] = s[1];
                out.push_back(std::move(v));
            }
        }
    }
    return out;
}

PairEnumeration enumerate_planted_pairs(const DenseTensor& Y, double gamma, Prior prior, const SearchOptions& opt) {
    SearchOptions quiet = opt;
    quiet.trace = nullptr;
    PairEnumeration result;
    for (auto& start : planted_pair_starts(Y.dim(), prior)) {
        RunOutcome out = greedy_sparse(Y, SearchState(std::move(start)), gamma, quiet);
        if (result.runs == 0) {
            result.best = std::move(out);
        } else {
            if (!(out.final_state == result.best.final_state)) result.outputs_agree = false;
            if (out.final_energy > result.best.final_energy) result.best = std::move(out);
        }
        ++result.runs;
    }
    return result;
}

std::size_t norm_cap(std::size_t k) { return (3 * k + 1) / 2; }

SearchState greedy_peel(const DenseTensor& Y, std::size_t k, const PeelObserver& observer) {
    const std::size_t n = Y.dim();
    const int r = Y.order();
    const std::size_t target = norm_cap(k);
    if (k == 0 || target > n) throw InvalidParameters("peeling needs 1 <= ceil(3k/2) <= n");
    const DenseTensor Q = truncate_nonnegative(Y);
    SearchState active(std::vector<Spin>(n, 1));
    SparseVector p = SparseVector::from_spins(active.values());
    std::vector<double> scores(n, 0.0);
    std::vector<SlotVector> slots(static_cast<std::size_t>(r), p.view());
    contract_free_slot(Q, slots, 0, 1.0, scores);

    for (std::size_t t = 0; t + target < n; ++t) {
        std::size_t ell = n;
        for (std::size_t i = 0; i < n; ++i)
            if (active[i] == 1 && (ell == n || scores[i] < scores[ell])) ell = i;
        active.apply({ell, 0});
        p.erase(static_cast<std::uint32_t>(ell));
        // remove every (r-1)-tuple of the old support that touches ell
        const std::uint32_t idx = static_cast<std::uint32_t>(ell);
        const double one = 1.0;
        const SlotVector e{&idx, &one, 1};
        const unsigned others = ((1u << r) - 1u) & ~1u;
        for (unsigned sub = others; sub != 0; sub = (sub - 1) & others) {
            for (int m = 0; m < r; ++m) slots[m] = (sub >> m) & 1u ? e : p.view();
            contract_free_slot(Q, slots, 0, -1.0, scores);
        }
        if (observer) observer(active, scores);
    }
    return active;
}

RunOutcome rand_greedy_binary_constrained(const DenseTensor& Y, SearchState init, double gamma, std::size_t m,
                                          std::size_t cap, Rng& proposals, const SearchOptions& opt) {
    require_values(init, true, false, "binary search");
    if (cap == 0) throw InvalidParameters("support cap must be positive");
    if (init.support_size() > cap) throw InvalidParameters("initial support exceeds the norm cap");
    const int r = Y.order();
    Runner run(Y, std::move(init), half_power(r, gamma), opt);
    const Termination term = run_accepted_budget(run, Neighborhood::Binary, cap, m, proposals, opt);
    return run.finish(term, r);
}

RunOutcome rand_greedy_binary(const DenseTensor& Y, SearchState init, double gamma, std::size_t m, Rng& proposals,
                              const SearchOptions& opt) {
    require_values(init, true, false, "binary search");
    const int r = Y.order();
    Runner run(Y, std::move(init), half_power(r, gamma), opt);
    const Termination term = run_accepted_budget(run, Neighborhood::Binary, std::nullopt, m, proposals, opt);
    return run.finish(term, r);
}

RunOutcome rand_greedy_trinary(const DenseTensor& Y, SearchState init, double gamma, std::size_t m, Rng& proposals,
                               const SearchOptions& opt) {
    const int r = Y.order();
    Runner run(Y, std::move(init), half_power(r, gamma), opt);
    const Termination term = run_accepted_budget(run, Neighborhood::Trinary, std::nullopt, m, proposals, opt);
    return run.finish(term, r);
}

RunOutcome rand_greedy_signflip(const DenseTensor& Y, SearchState init, std::size_t m, Rng& proposals,
                                const SearchOptions& opt) {
    require_values(init, false, true, "sign-flip search");
    const int r = Y.order();
    Runner run(Y, std::move(init), half_power(r, 0.0), opt);
    const std::uint64_t n = run.n();
    std::uint64_t rejections = 0;
    std::uint64_t next_check = n;
    for (std::size_t t = 0; t < m; ++t) {
        const Move mv = draw_signflip(run.state(), proposals);
        const bool accept = run.ev().delta_energy(mv.coordinate, mv.new_value) > 0.0;
        if (accept) {
            run.ev().commit(mv);
            rejections = 0;
            next_check = n;
        } else {
            ++rejections;
        }
        run.record(mv.coordinate, mv.new_value, accept);
        if (!accept && opt.stall_detection && rejections >= next_check) {
            if (is_local_max(run.ev(), Neighborhood::SignFlip)) return run.finish(Termination::LocalMax, r);
            next_check *= 2;
        }
    }
    return run.finish(Termination::Completed, r);
}

RunOutcome thresholded_signflip(const DenseTensor& Y, SearchState init, ThresholdBank bank, Rng& proposals,
                                const SearchOptions& opt) {
    require_values(init, false, true, "sign-flip search");
    if (bank.dim() != init.size()) throw InvalidParameters("threshold bank dimension mismatch");
    const int r = Y.order();
    Runner run(Y, std::move(init), half_power(r, 0.0), opt);
    for (;;) {
        const Move mv = draw_signflip(run.state(), proposals);
        const std::optional<double> z = bank.next_threshold(mv.coordinate);
        if (!z) break;
        const double v = diff_frobenius(run.state(), mv, r);
        const bool accept = run.ev().delta_energy(mv.coordinate, mv.new_value) > v * *z;
        if (accept) run.ev().commit(mv);
        run.record(mv.coordinate, mv.new_value, accept);
    }
    return run.finish(Termination::Completed, r);
}

RunOutcome thresholded_trinary(const DenseTensor& Y, SearchState init, double gamma, ThresholdBank bank,
                               Rng& proposals, bool lazy, const SearchOptions& opt) {
    if (bank.dim() != init.size()) throw InvalidParameters("threshold bank dimension mismatch");
    const int r = Y.order();
    const std::uint64_t n = init.size();
    const std::uint64_t total = (static_cast<std::uint64_t>(bank.budget()) * n + 1) / 2;
    Runner run(Y, std::move(init), half_power(r, gamma), opt);
    Termination term = Termination::Completed;
    for (std::uint64_t t = 0; t < total; ++t) {
        Move mv;
        if (lazy) {
            mv.coordinate = static_cast<std::size_t>(proposals.below(n));
            mv.new_value = static_cast<Spin>(static_cast<int>(proposals.below(3)) - 1);
        } else {
            mv = draw_trinary(run.state(), proposals);
        }
        const std::optional<double> z = bank.next_threshold(mv.coordinate);
        if (!z) {
            term = Termination::ThresholdOverflow;
            break;
        }
        bool accept = false;
        if (mv.new_value != run.state()[mv.coordinate]) {
            const double v = diff_frobenius(run.state(), mv, r);
            accept = run.ev().delta_energy(mv.coordinate, mv.new_value) > v * *z;
        }
        if (accept) run.ev().commit(mv);
        run.record(mv.coordinate, mv.new_value, accept);
    }
    return run.finish(term, r);
}

RunOutcome two_stage_trinary(const DenseTensor& Y, std::size_t m1, std::size_t m2, double gamma, bool unthresholded,
                             bool lazy, TwoStageStreams streams, const SearchOptions& opt) {
    SearchState s0 = homotopy_init(Y);
    const std::size_t n = Y.dim();
    RunOutcome first = unthresholded
                           ? rand_greedy_signflip(Y, std::move(s0), m1, streams.first_proposals, opt)
                           : thresholded_signflip(Y, std::move(s0), generate_thresholds(n, m1, streams.first_thresholds),
                                                  streams.first_proposals, opt);
    SearchOptions second_opt = opt;
    second_opt.proposal_offset = opt.proposal_offset + first.proposals;
    second_opt.accepted_offset = opt.accepted_offset + first.accepted_steps;
    RunOutcome second =
        unthresholded
            ? rand_greedy_trinary(Y, std::move(first.final_state), gamma, m2, streams.second_proposals, second_opt)
            : thresholded_trinary(Y, std::move(first.final_state), gamma,
                                  generate_thresholds(n, m2, streams.second_thresholds), streams.second_proposals,
                                  lazy, second_opt);
    second.accepted_steps += first.accepted_steps;
    second.proposals += first.proposals;
    return second;
}

RunOutcome two_stage_binary(const DenseTensor& Y, std::size_t k, double gamma, std::size_t m, Rng& proposals,
                            const SearchOptions& opt) {
    const std::size_t n = Y.dim();
    const std::size_t cap = norm_cap(k);
    SearchState init = cap >= n ? SearchState(std::vector<Spin>(n, 1)) : greedy_peel(Y, k);
    return rand_greedy_binary_constrained(Y, std::move(init), gamma, m, std::min(cap, n), proposals, opt);
}

}  // namespace stpca
