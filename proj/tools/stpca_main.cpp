#include <cmath>
#include <fstream>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stpca/config.hpp"
#include "stpca/errors.hpp"
#include "stpca/harness.hpp"
#include "stpca/phases.hpp"
#include "stpca/verify.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;

struct RunFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<std::string> out;
    unsigned workers = 1;
    std::optional<std::string> trace;
    bool symmetrize = false;
    bool lazy = false;
    bool zero_wall_time = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--config", f.config, "Experiment config (JSON)")->required();
    cmd->add_option("--seed", f.seed, "Override the base seed");
    cmd->add_option("--reps", f.reps, "Override the replication count");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--trace", f.trace, "Trace mode: full, decimated or off");
    cmd->add_flag("--symmetrize-noise", f.symmetrize, "Symmetrize the noise tensor");
    cmd->add_flag("--lazy", f.lazy, "Lazy proposals for the thresholded searches");
    cmd->add_flag("--zero-wall-time", f.zero_wall_time, "Write wall_seconds as 0 for byte-stable output");
}

stpca::ExperimentConfig resolve(const RunFlags& f) {
    stpca::ExperimentConfig cfg = stpca::load_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    if (f.reps) cfg.replications = *f.reps;
    if (f.out) cfg.output_dir = *f.out;
    if (f.trace) cfg.trace = stpca::parse_trace_mode(*f.trace);
    if (f.symmetrize) cfg.params.symmetrize_noise = true;
    if (f.lazy) cfg.algorithm.lazy = true;
    cfg.validate();
    return cfg;
}

int run(const stpca::ExperimentConfig& cfg, const RunFlags& f) {
    stpca::RunOptions opt;
    opt.workers = f.workers;
    opt.record_wall_time = !f.zero_wall_time;
    std::size_t runs = 0, recovered = 0;
    const std::filesystem::path dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
    std::ofstream trace(dir / "trace.csv");
    std::ofstream summary(dir / "summary.csv");
    if (!trace || !summary) throw std::runtime_error("cannot write outputs in " + dir.string());
    trace << stpca::kTraceHeader << '\n';
    summary << stpca::kSummaryHeader << '\n';
    stpca::run_experiment(cfg, opt, [&](stpca::RunResult&& r) {
        for (const auto& row : r.trace) trace << stpca::format_trace_row(row) << '\n';
        summary << stpca::format_summary_row(r.summary) << '\n';
        ++runs;
        recovered += r.summary.recovered != stpca::Recovery::Failed;
    });
    std::cout << runs << " runs, " << recovered << " recovered; wrote " << (dir / "summary.csv").string() << " and "
              << (dir / "trace.csv").string() << '\n';
    return 0;
}

void print_prediction_table() {
    struct Row {
        const char* label;
        stpca::InitKind init;
        double alpha_k;
    };
    const Row rows[] = {
        {"binary, all ones", stpca::InitKind::AllOnes, 0.6},
        {"binary, uniform k-sparse", stpca::InitKind::UniformKSparse, 0.6},
        {"trinary, uniform trinary", stpca::InitKind::UniformTrinary, 0.8},
        {"trinary, homotopy", stpca::InitKind::Homotopy, 0.8},
    };
    std::printf("%-28s %8s %4s %10s\n", "case", "alpha_k", "r", "threshold");
    for (const Row& row : rows)
        std::printf("%-28s %8.2f %4d %10.3f\n", row.label, row.alpha_k, 3,
                    stpca::predicted_threshold(row.init, row.alpha_k, 3));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse tensor PCA local search simulations"};
    app.require_subcommand(1);

    RunFlags sim_flags, sweep_flags, peel_flags;
    CLI::App* simulate = app.add_subcommand("simulate", "Run one configuration at a single lambda");
    add_run_flags(simulate, sim_flags);
    CLI::App* sweep = app.add_subcommand("sweep", "Run a configuration over its alpha grid");
    add_run_flags(sweep, sweep_flags);
    CLI::App* peel = app.add_subcommand("peel", "Run greedy peeling on the configured instances");
    add_run_flags(peel, peel_flags);

    CLI::App* verify = app.add_subcommand("verify", "Run the property suites");
    std::string suite = "all";
    std::uint64_t verify_seed = stpca::VerifyOptions{}.seed;
    std::string inject;
    verify->add_option("--suite", suite, "delta, rank1, frobenius, sgc, exhaustive or all");
    verify->add_option("--seed", verify_seed, "Seed for the randomized suites");
    verify->add_option("--inject-bug", inject, "Negative control; only 'delta' is available");

    CLI::App* predict = app.add_subcommand("predict", "Print predicted alpha thresholds");
    std::string predict_config;
    predict->add_option("--config", predict_config, "Predict for this config instead of printing the table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*simulate) {
            stpca::ExperimentConfig cfg = resolve(sim_flags);
            if (cfg.points() != 1) throw stpca::ConfigError("simulate takes exactly one alpha; use sweep for a grid");
            return run(cfg, sim_flags);
        }
        if (*sweep) return run(resolve(sweep_flags), sweep_flags);
        if (*peel) {
            stpca::ExperimentConfig cfg = resolve(peel_flags);
            cfg.algorithm.kind = stpca::AlgorithmKind::GreedyPeel;
            cfg.validate();
            return run(cfg, peel_flags);
        }
        if (*verify) {
            stpca::VerifyOptions opt;
            opt.seed = verify_seed;
            if (!inject.empty()) {
                if (inject != "delta") throw stpca::ConfigError("unknown bug hook '" + inject + "'");
                opt.inject_delta_bug = true;
            }
            const stpca::VerifyReport report = stpca::verify(stpca::parse_verify_suite(suite), opt);
            stpca::print_report(std::cout, report);
            return report.passed() ? 0 : kExitVerify;
        }
        if (*predict) {
            if (predict_config.empty()) {
                print_prediction_table();
            } else {
                const stpca::ExperimentConfig cfg = stpca::load_config(predict_config);
                const stpca::ProblemParams p = cfg.params;
                std::printf("%.4f\n", stpca::predicted_threshold(cfg.init.kind, p));
            }
            return 0;
        }
    } catch (const stpca::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameters: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
