// dynbc: solve, verify, sweep and oracle-compare driver.
//
// Exit codes: 0 ok, 2 config or argument error, 3 solver failure,
// 4 failed suite entry or slope band, 5 too few points for a rate fit.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

#include "dynbc/config.hpp"
#include "dynbc/io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace dynbc;

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kFailed = 4, kInsufficient = 5 };

struct Overrides {
    std::string config_path;
    std::vector<double> eps;
    std::optional<double> horizon;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool print_config = false;
};

RunConfig effective_config(const Overrides& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (!o.eps.empty()) {
        cfg.eps = o.eps.front();
        cfg.eps_values = o.eps;
    }
    if (o.horizon) cfg.horizon = *o.horizon;
    if (const char* env = std::getenv("DYNBC_OUT"); env && *env) cfg.out_dir = env;
    if (o.out) cfg.out_dir = *o.out;
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;
    cfg.validate();
    return cfg;
}

std::vector<double> times_within(const std::vector<double>& t, double horizon) {
    std::vector<double> out;
    for (double s : t)
        if (s <= horizon * (1 + 1e-12)) out.push_back(std::min(s, horizon));
    return out;
}

int cmd_solve(const RunConfig& cfg) {
    HalfSpaceGrid grid;
    std::vector<std::string> notes;
    const ProblemSpec spec = solve_problem(cfg, &grid, &notes);
    for (const auto& n : notes) std::cerr << "note: " << n << '\n';
    const std::vector<double> out_times = times_within(cfg.field_times, cfg.horizon);
    const SolverRun run = continue_global(prepare(spec), cfg.horizon, cfg.solver, out_times);
    const auto files = write_run_fields(cfg.out_dir, run, cfg.fields, out_times);
    write_text(cfg.out_dir, "manifest.txt", solve_manifest(cfg, grid, notes, run, files));
    write_text(cfg.out_dir, "report.txt", norm_summary(run));
    std::cout << norm_summary(run);
    if (cfg.data.phi == "constant" && cfg.data.phi_b == "constant") {
        double dev = 0;
        for (const Field& u : run.u) dev = std::max(dev, (u.values().array() - cfg.data.level).abs().maxCoeff());
        std::cout << "max |u - " << cfg.data.level << "| = " << dev << '\n';
    }
    if (!run.complete) {
        std::cerr << "solver failure: " << run.failure << '\n';
        return kSolver;
    }
    return kOk;
}

int cmd_verify(const RunConfig& cfg) {
    const SuiteReport rep = run_lemma_suite(suite_config(cfg));
    write_text(cfg.out_dir, "manifest.txt", command_manifest("verify", cfg));
    write_text(cfg.out_dir, "report.txt", format_suite(rep));
    int failed = 0;
    for (const SuiteEntry& e : rep.entries) {
        if (!e.pass) ++failed;
        std::cout << (e.pass ? "PASS " : "FAIL ") << e.name << "  margin " << e.margin << '\n';
    }
    std::cout << rep.entries.size() - failed << "/" << rep.entries.size() << " entries pass\n";
    return rep.all_pass() ? kOk : kFailed;
}

int cmd_sweep(const RunConfig& cfg) {
    const SweepPlan plan = sweep_plan(cfg);
    plan.validate();
    const RateReport rep = run_sweep(plan);
    write_text(cfg.out_dir, "manifest.txt", command_manifest("sweep", cfg));
    write_text(cfg.out_dir, "report.txt", format_report(rep));
    write_rates(cfg.out_dir, rep);
    for (const FunctionalReport& f : rep.functionals) {
        std::cout << f.name << ": " << f.status;
        if (f.fit) std::cout << "  slope " << f.fit->slope << " (band " << f.band.lo << ".." << f.band.hi << ")";
        std::cout << '\n';
    }
    for (const SweepPoint& p : rep.runs)
        if (!p.solved) std::cerr << "eps " << p.eps << ": " << p.failure << '\n';
    if (rep.insufficient()) return kInsufficient;
    return rep.bands_pass() ? kOk : kFailed;
}

int cmd_oracle(const RunConfig& cfg) {
    HalfSpaceGrid grid;
    std::vector<std::string> notes;
    const ProblemSpec spec = solve_problem(cfg, &grid, &notes);
    const SweepPlan plan = sweep_plan(cfg);
    const std::vector<double> window = times_within(window_times(plan), cfg.horizon);
    FDConfig fdc;
    fdc.dt = cfg.fd_dt;
    fdc.output_times = window;
    const FDHistory fd = fd_solve(spec, fdc);
    // compare at the FD output times, which are rounded to whole steps
    const SolverRun run = continue_global(prepare(spec), cfg.horizon, cfg.solver, fd.times);
    write_text(cfg.out_dir, "manifest.txt", command_manifest("oracle-compare", cfg));
    if (!run.complete) {
        std::cerr << "solver failure: " << run.failure << '\n';
        return kSolver;
    }
    const OracleGap gap = oracle_gap(run, fd, cfg.K_lateral, cfg.K_depth);
    write_text(cfg.out_dir, "report.txt", oracle_report(cfg, grid, fd, gap, run));
    for (const auto& w : fd.warnings) std::cerr << "fd warning: " << w << '\n';
    for (std::size_t j = 0; j < gap.times.size(); ++j) std::cout << "t " << gap.times[j] << "  gap " << gap.gaps[j] << '\n';
    std::cout << "sup gap " << gap.sup_gap << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heat equation on a half-space with a dynamical boundary condition"};
    app.require_subcommand(1);
    app.fallthrough();
    Overrides o;
    app.add_option("--config", o.config_path, "JSON run configuration");
    app.add_option("--eps", o.eps, "eps (solve, oracle-compare) or the sweep list")->expected(1, -1);
    app.add_option("--horizon", o.horizon, "final time");
    app.add_option("--out", o.out, "output directory (overrides DYNBC_OUT)");
    app.add_option("--seed", o.seed, "suite seed");
    app.add_option("--threads", o.threads, "worker cap");
    app.add_flag("--print-config", o.print_config, "print the effective config and exit");

    CLI::App* solve = app.add_subcommand("solve", "mild solution for one eps");
    CLI::App* verify = app.add_subcommand("verify", "lemma and identity suite");
    CLI::App* sweep = app.add_subcommand("sweep", "eps sweep with rate fits");
    CLI::App* oracle = app.add_subcommand("oracle-compare", "finite differences against the mild solution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    RunConfig cfg;
    try {
        cfg = effective_config(o);
        if (sweep->parsed()) sweep_plan(cfg).validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    }
    if (o.print_config) {
        std::cout << dump_config(cfg);
        return kOk;
    }
#ifdef _OPENMP
    omp_set_num_threads(cfg.threads);
#endif

    try {
        if (solve->parsed()) return cmd_solve(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg);
        if (oracle->parsed()) return cmd_oracle(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolver;
    }
    return kConfig;
}
