#include "stpca/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "stpca/errors.hpp"
#include "stpca/evaluator.hpp"
#include "stpca/hamiltonian.hpp"
#include "stpca/search.hpp"
#include "stpca/sgc.hpp"
#include "stpca/stats.hpp"

namespace stpca {

namespace {

std::string line(const char* fmt, double a = 0, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c);
    return buf;
}

DenseTensor gaussian_tensor(std::size_t n, int r, Rng& rng) {
    DenseTensor t(n, r);
    for (double& x : t.entries()) x = rng.normal();
    return t;
}

std::vector<Spin> random_trinary(std::size_t n, Rng& rng) {
    std::vector<Spin> v(n);
    for (Spin& x : v) x = static_cast<Spin>(static_cast<int>(rng.below(3)) - 1);
    return v;
}

/// Every vector of {-1,0,1}^n, in base-3 order.
std::vector<std::vector<Spin>> all_trinary(std::size_t n) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 3;
    std::vector<std::vector<Spin>> out;
    out.reserve(total);
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<Spin> v(n);
        std::size_t c = code;
        for (std::size_t i = 0; i < n; ++i, c /= 3) v[i] = static_cast<Spin>(static_cast<int>(c % 3) - 1);
        out.push_back(std::move(v));
    }
    return out;
}

double brute_energy(const DenseTensor& Y, std::span<const Spin> s, const HamiltonianParams& hp) {
    std::size_t supp = 0;
    for (Spin x : s) supp += x != 0;
    return brute_force_inner(Y, s) - hp.gamma * std::pow(static_cast<double>(supp), hp.beta);
}

/// Product-form entries prod_m u(i_m) for the whole [n]^r grid.
std::vector<double> outer_power(std::span<const double> u, int r) {
    const std::size_t n = u.size();
    std::vector<double> out{1.0};
    for (int m = 0; m < r; ++m) {
        std::vector<double> next;
        next.reserve(out.size() * n);
        for (double a : out)
            for (double b : u) next.push_back(a * b);
        out = std::move(next);
    }
    return out;
}

SuiteReport suite_delta(const VerifyOptions& opt) {
    SuiteReport rep{"delta", true, {}};
    Rng rng(opt.seed, 0, StreamPurpose::Verification);
    double worst = 0.0;
    double worst_incremental = 0.0;
    std::size_t failures = 0;
    for (std::size_t c = 0; c < opt.delta_cases; ++c) {
        const std::size_t n = 1 + rng.below(8);
        const int r = 2 + static_cast<int>(rng.below(3));
        const DenseTensor Y = gaussian_tensor(n, r, rng);
        const HamiltonianParams hp{1.0 + 2.0 * rng.uniform01(), 2.0 * rng.uniform01()};
        std::vector<Spin> v = random_trinary(n, rng);
        const Move mv{static_cast<std::size_t>(rng.below(n)), static_cast<Spin>(static_cast<int>(rng.below(3)) - 1)};
        const SearchState s(v);
        double kernel = delta_energy(Y, s, mv, hp);
        double incremental = IncrementalEvaluator(Y, s, hp).delta_energy(mv.coordinate, mv.new_value);
        if (opt.inject_delta_bug) {
            kernel = -kernel;
            incremental = -incremental;
        }
        std::vector<Spin> after = v;
        after[mv.coordinate] = mv.new_value;
        const double truth = brute_energy(Y, after, hp) - brute_energy(Y, v, hp);
        const double err = std::abs(kernel - truth) / (1.0 + std::abs(truth));
        const double err_inc = std::abs(incremental - truth) / (1.0 + std::abs(truth));
        worst = std::max(worst, err);
        worst_incremental = std::max(worst_incremental, err_inc);
        if (err > 1e-8 || err_inc > 1e-8) ++failures;
    }
    rep.passed = failures == 0;
    rep.lines.push_back(line("cases=%.0f failures=%.0f", static_cast<double>(opt.delta_cases), failures));
    rep.lines.push_back(line("max relative error kernel=%.3e incremental=%.3e (tolerance 1e-8)", worst,
                             worst_incremental));
    return rep;
}

SuiteReport suite_rank1() {
    SuiteReport rep{"rank1", true, {}};
    double worst = 0.0;
    std::size_t checks = 0;
    for (std::size_t n : {4u, 5u}) {
        const auto states = all_trinary(n);
        for (int r = 2; r <= 3; ++r) {
            for (const auto& a : states) {
                std::vector<double> u(a.begin(), a.end());
                const std::vector<double> uu = outer_power(u, r);
                for (const auto& b : states) {
                    std::vector<double> v(b.begin(), b.end());
                    const std::vector<double> vv = outer_power(v, r);
                    double brute = 0.0;
                    for (std::size_t h = 0; h < uu.size(); ++h) brute += uu[h] * vv[h];
                    const double closed = rank1_inner(u, v, r);
                    worst = std::max(worst, std::abs(closed - brute) / std::max(1.0, std::abs(brute)));
                    ++checks;
                }
            }
        }
    }
    rep.passed = worst <= 1e-9;
    rep.lines.push_back(line("exhaustive pairs=%.0f max relative error=%.3e (tolerance 1e-9)",
                             static_cast<double>(checks), worst));
    return rep;
}

SuiteReport suite_frobenius() {
    SuiteReport rep{"frobenius", true, {}};
    double worst = 0.0;
    std::size_t checks = 0;
    for (std::size_t n : {4u, 5u}) {
        const auto states = all_trinary(n);
        for (int r = 2; r <= 3; ++r) {
            for (const auto& a : states) {
                const SearchState s(a);
                std::vector<double> sv(a.begin(), a.end());
                const std::vector<double> before = outer_power(sv, r);
                for (std::size_t i = 0; i < n; ++i) {
                    for (int q = -1; q <= 1; ++q) {
                        std::vector<double> uv = sv;
                        uv[i] = q;
                        const std::vector<double> after = outer_power(uv, r);
                        double sq = 0.0;
                        for (std::size_t h = 0; h < after.size(); ++h) sq += (after[h] - before[h]) * (after[h] - before[h]);
                        const double closed = diff_frobenius(s, {i, static_cast<Spin>(q)}, r);
                        worst = std::max(worst, std::abs(closed - std::sqrt(sq)) / std::max(1.0, std::sqrt(sq)));
                        ++checks;
                    }
                }
            }
        }
    }
    // all-ones state of length 3, one sign flipped, r = 2: sqrt(2 (n^r - (n-2)^r)) = 4
    const double vn = diff_frobenius(SearchState(std::vector<Spin>{1, 1, 1}), {0, -1}, 2);
    const bool vn_ok = std::abs(vn - 4.0) < 1e-12;
    rep.passed = worst <= 1e-9 && vn_ok;
    rep.lines.push_back(line("exhaustive moves=%.0f max relative error=%.3e (tolerance 1e-9)",
                             static_cast<double>(checks), worst));
    rep.lines.push_back(line("sign flip of all-ones n=3 r=2: V=%.12g (expected 4)", vn));
    return rep;
}

SuiteReport suite_sgc(const VerifyOptions& opt) {
    SuiteReport rep{"sgc", true, {}};
    const std::size_t M = opt.sgc_budget;
    const std::size_t T = opt.sgc_trials;
    const double mu = 1.5;
    const SgcLaw law = measure_sgc_law(M, T, mu, opt.seed);
    const SgcLaw null_law = measure_sgc_law(M, T, 0.0, opt.seed + 1);
    // family-wise 1% error budgets, split evenly across the individual checks
    const double mean_tol = normal_upper_quantile(0.01 / (2.0 * M)) * std::sqrt(static_cast<double>(M) / T);
    const double corr_tol = normal_upper_quantile(0.01 / (2.0 * law.pairs)) / std::sqrt(static_cast<double>(T));
    double worst_mean = 0.0, worst_var = 0.0;
    for (std::size_t t = 0; t < law.emitted_steps; ++t) {
        worst_mean = std::max(worst_mean, std::abs(law.step_mean[t] - mu));
        worst_var = std::max(worst_var, std::abs(law.step_variance[t] / M - 1.0));
    }
    const double min_p = *std::min_element(null_law.ks_p_value.begin(), null_law.ks_p_value.end());
    const bool steps_ok = law.emitted_steps == M;
    const bool mean_ok = worst_mean <= mean_tol;
    const bool var_ok = worst_var <= 0.05;
    const bool corr_ok = law.max_abs_correlation <= corr_tol;
    const bool ks_ok = min_p >= 0.01 / static_cast<double>(M);
    rep.passed = steps_ok && mean_ok && var_ok && corr_ok && ks_ok;
    rep.lines.push_back(line("M=%.0f trials=%.0f emitted steps=%.0f", static_cast<double>(M), static_cast<double>(T),
                             static_cast<double>(law.emitted_steps)));
    rep.lines.push_back(line("max |mean - mu|=%.4f (bound %.4f)", worst_mean, mean_tol));
    rep.lines.push_back(line("max |var/M - 1|=%.4f (bound 0.05)", worst_var));
    rep.lines.push_back(line("max |corr| over %.0f pairs=%.4f (family-wise bound %.4f)",
                             static_cast<double>(law.pairs), law.max_abs_correlation, corr_tol));
    rep.lines.push_back(line("min KS p-value (mu=0)=%.4g (bound %.4g)", min_p, 0.01 / static_cast<double>(M)));
    return rep;
}

/// Steepest ascent by explicit enumeration of every neighbor's energy.
std::vector<Spin> brute_greedy(const DenseTensor& Y, std::vector<Spin> s, const HamiltonianParams& hp) {
    for (;;) {
        const double here = brute_energy(Y, s, hp);
        double best = here;
        std::vector<Spin> best_state;
        for (std::size_t i = 0; i < s.size(); ++i) {
            for (int q = -1; q <= 1; ++q) {
                if (q == s[i]) continue;
                std::vector<Spin> t = s;
                t[i] = static_cast<Spin>(q);
                const double e = brute_energy(Y, t, hp);
                if (e - here > best - here) {
                    best = e;
                    best_state = std::move(t);
                }
            }
        }
        if (best_state.empty()) return s;
        s = std::move(best_state);
    }
}

SuiteReport suite_exhaustive(const VerifyOptions& opt) {
    SuiteReport rep{"exhaustive", true, {}};
    Rng rng(opt.seed, 1, StreamPurpose::Verification);
    std::size_t mismatches = 0, states = 0;
    {
        const std::size_t n = 5;
        const DenseTensor Y = gaussian_tensor(n, 2, rng);
        const HamiltonianParams hp{2.0, 0.3};
        for (const auto& v : all_trinary(n)) {
            const double here = brute_energy(Y, v, hp);
            bool brute = true;
            for (std::size_t i = 0; i < n && brute; ++i) {
                for (int q = -1; q <= 1; ++q) {
                    if (q == v[i]) continue;
                    std::vector<Spin> t = v;
                    t[i] = static_cast<Spin>(q);
                    if (brute_energy(Y, t, hp) - here > 1e-12) brute = false;
                }
            }
            if (brute != is_local_max(Y, SearchState(v), hp)) ++mismatches;
            ++states;
        }
    }
    rep.lines.push_back(line("local-max classification n=5: states=%.0f mismatches=%.0f", static_cast<double>(states),
                             static_cast<double>(mismatches)));
    std::size_t greedy_mismatch = 0, greedy_runs = 0;
    {
        const std::size_t n = 6;
        const DenseTensor Y = gaussian_tensor(n, 2, rng);
        const double gamma = 0.5;
        const HamiltonianParams hp{2.0, gamma};
        for (const auto& start : all_trinary(n)) {
            if (greedy_runs % 7 != 0) {
                ++greedy_runs;
                continue;
            }
            const RunOutcome out = greedy_sparse(Y, SearchState(start), gamma);
            const std::vector<Spin> expect = brute_greedy(Y, start, hp);
            if (!std::equal(expect.begin(), expect.end(), out.final_state.values().begin())) ++greedy_mismatch;
            ++greedy_runs;
        }
    }
    rep.lines.push_back(line("greedy vs enumerated steepest ascent n=6: starts=%.0f mismatches=%.0f",
                             static_cast<double>((greedy_runs + 6) / 7), static_cast<double>(greedy_mismatch)));
    rep.passed = mismatches == 0 && greedy_mismatch == 0;
    return rep;
}

}  // namespace

double brute_force_inner(const DenseTensor& Y, std::span<const Spin> sigma) {
    const std::size_t n = Y.dim();
    const int r = Y.order();
    if (sigma.size() != n) throw InvalidState("state length differs from tensor dimension");
    double total = 0.0;
    std::vector<std::size_t> idx(static_cast<std::size_t>(r), 0);
    for (std::size_t flat = 0; flat < Y.size(); ++flat) {
        double w = 1.0;
        for (int m = 0; m < r; ++m) w *= sigma[idx[m]];
        total += w * Y[flat];
        for (int m = r - 1; m >= 0; --m) {
            if (++idx[m] < n) break;
            idx[m] = 0;
        }
    }
    return total;
}

SgcLaw measure_sgc_law(std::size_t budget, std::size_t trials, double mu, std::uint64_t seed) {
    SgcLaw law;
    law.budget = budget;
    law.trials = trials;
    law.mu = mu;
    const std::vector<double> mean_vec{mu, -1.0, 0.5, 2.0};
    CloneSchedule schedule;
    schedule.subsets.assign(budget + 3, std::vector<std::size_t>{0});
    std::vector<std::vector<double>> x(budget, std::vector<double>(trials, 0.0));
    std::size_t emitted = budget;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng(seed, trial, StreamPurpose::Verification);
        const auto obs = sgc_stream(mean_vec, schedule, budget, rng);
        emitted = std::min(emitted, obs.size());
        for (std::size_t t = 0; t < obs.size() && t < budget; ++t) x[t][trial] = obs[t].values[0];
    }
    law.emitted_steps = emitted;
    const double sd = std::sqrt(static_cast<double>(budget));
    for (std::size_t t = 0; t < emitted; ++t) {
        law.step_mean.push_back(mean(x[t]));
        law.step_variance.push_back(variance(x[t]));
        law.ks_p_value.push_back(ks_test_normal(x[t], mu, sd).p_value);
        for (std::size_t u = t + 1; u < emitted; ++u) {
            law.max_abs_correlation = std::max(law.max_abs_correlation, std::abs(correlation(x[t], x[u])));
            ++law.pairs;
        }
    }
    return law;
}

VerifySuite parse_verify_suite(std::string_view text) {
    if (text == "delta") return VerifySuite::Delta;
    if (text == "rank1") return VerifySuite::Rank1;
    if (text == "frobenius") return VerifySuite::Frobenius;
    if (text == "sgc") return VerifySuite::Sgc;
    if (text == "exhaustive") return VerifySuite::Exhaustive;
    if (text == "all") return VerifySuite::All;
    throw ConfigError("unknown verify suite '" + std::string(text) + "'");
}

std::string_view to_string(VerifySuite suite) {
    switch (suite) {
        case VerifySuite::Delta: return "delta";
        case VerifySuite::Rank1: return "rank1";
        case VerifySuite::Frobenius: return "frobenius";
        case VerifySuite::Sgc: return "sgc";
        case VerifySuite::Exhaustive: return "exhaustive";
        case VerifySuite::All: return "all";
    }
    return "";
}

bool VerifyReport::passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteReport& s) { return s.passed; });
}

VerifyReport verify(VerifySuite suite, const VerifyOptions& opt) {
    VerifyReport rep;
    const bool all = suite == VerifySuite::All;
    if (all || suite == VerifySuite::Delta) rep.suites.push_back(suite_delta(opt));
    if (all || suite == VerifySuite::Rank1) rep.suites.push_back(suite_rank1());
    if (all || suite == VerifySuite::Frobenius) rep.suites.push_back(suite_frobenius());
    if (all || suite == VerifySuite::Sgc) rep.suites.push_back(suite_sgc(opt));
    if (all || suite == VerifySuite::Exhaustive) rep.suites.push_back(suite_exhaustive(opt));
    return rep;
}

void print_report(std::ostream& out, const VerifyReport& report) {
    for (const SuiteReport& s : report.suites) {
        out << (s.passed ? "PASS " : "FAIL ") << s.name << '\n';
        for (const std::string& l : s.lines) out << "  " << l << '\n';
    }
    out << (report.passed() ? "all suites passed" : "verification failed") << '\n';
}

}  // namespace stpca
