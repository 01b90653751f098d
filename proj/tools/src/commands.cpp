#include "survival_cli/commands.hpp"

#include <survival/config.hpp>
#include <survival/errors.hpp>
#include <survival/io.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace survival::cli {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
    os << text;
    if (!os) throw ConfigError("failed writing '" + path.string() + "'");
}

RunConfig load(const CommandOptions& opts)
{
    if (opts.out.empty()) throw ConfigError("--out is required");
    RunConfig cfg = load_run_config(opts.config);
    if (opts.seed) {
        if (*opts.seed < 0) throw ConfigError("--seed must be >= 0");
        cfg.sim.seed = static_cast<std::uint64_t>(*opts.seed);
    }
    cfg.sim.threads = effective_threads(opts.threads, cfg.sim.threads);
    cfg.validation.sim.seed = cfg.sim.seed;
    cfg.validation.sim.threads = cfg.sim.threads;
    return cfg;
}

Solution run_solver(const RunConfig& cfg, const ModelParams& params, const JumpDistribution& dist)
{
    if (cfg.adaptive) return solve_adaptive(params, dist, cfg.solver, cfg.grid);
    return solve(params, dist, cfg.grid.build(params), cfg.solver);
}

template <class Body>
int guarded(std::ostream& err, Body&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const ModelError& e) {
        err << "invalid input: " << e.what() << '\n';
        return exit_config_error;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical_failure;
    }
}

} // namespace

int effective_threads(const std::optional<int>& flag, int fallback)
{
    if (flag) {
        if (*flag < 0) throw ConfigError("--threads must be >= 0");
        return *flag;
    }
    if (const char* env = std::getenv("SURVIVAL_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 0) throw ConfigError(std::string("SURVIVAL_THREADS: expected a non-negative integer, got '") + env + "'");
        return static_cast<int>(v);
    }
    return fallback;
}

int cmd_solve(const CommandOptions& opts, std::ostream& log, std::ostream& err)
{
    return guarded(err, [&] {
        const RunConfig cfg = load(opts);
        const auto params = cfg.model.build();
        const auto dist = cfg.jumps.build();
        const Solution solution = run_solver(cfg, params, dist);

        std::ostringstream csv;
        write_solution_csv(solution, csv);
        write_file(opts.out, csv.str());

        fs::path diag = cfg.output.diagnostics;
        if (diag.empty()) diag = fs::path(opts.out).replace_extension(".diagnostics.json");
        write_file(diag, solution_diagnostics_json(solution));

        if (!cfg.output.operator_csv.empty()) {
            std::ostringstream op_csv;
            write_operator_csv(assemble(params, dist, solution.grid, cfg.solver.scheme), op_csv);
            write_file(cfg.output.operator_csv, op_csv.str());
        }

        for (const auto& w : solution.warnings) err << "warning: " << w << '\n';
        log << "solved on " << solution.grid.size() << " nodes, U_max = " << format_double(solution.u_max_used)
            << ", residual = " << format_double(solution.residual_norm) << '\n';
        return static_cast<int>(exit_ok);
    });
}

int cmd_simulate(const CommandOptions& opts, std::ostream& log, std::ostream& err)
{
    return guarded(err, [&] {
        if (!opts.u) throw ConfigError("--u is required for simulate");
        if (!(*opts.u > 0.0) || !std::isfinite(*opts.u)) throw ConfigError("--u must be a positive number");
        RunConfig cfg = load(opts);
        const auto params = cfg.model.build();
        const auto dist = cfg.jumps.build();
        if (auto w = dist.support_warning(); !w.empty()) err << "warning: " << w << '\n';
        if (params.payout_free()) err << "warning: payout-free diagnostic mode (c = 0)\n";

        if (cfg.barrier_auto) cfg.sim.barrier = informed_barrier(run_solver(cfg, params, dist), cfg.barrier_slack);

        const auto outcomes = simulate_paths(params, dist, *opts.u, cfg.sim);
        const auto est = summarize(outcomes);
        write_file(opts.out, estimate_json(est));
        if (!cfg.output.paths_csv.empty()) {
            std::ostringstream paths;
            write_paths_csv(outcomes, paths);
            write_file(cfg.output.paths_csv, paths.str());
        }
        log << "u = " << format_double(*opts.u) << ": [" << format_double(est.lower) << ", "
            << format_double(est.upper) << "], stderr " << format_double(est.std_error) << ", barrier "
            << format_double(cfg.sim.barrier) << '\n';
        return static_cast<int>(exit_ok);
    });
}

int cmd_validate(const CommandOptions& opts, std::ostream& log, std::ostream& err)
{
    return guarded(err, [&] {
        const RunConfig cfg = load(opts);
        const auto report = run_validation(cfg.model.build(), cfg.jumps.build(), cfg.validation);
        write_file(opts.out, report_to_json(report));
        print_table(report, log);
        if (report.passed()) return static_cast<int>(exit_ok);
        for (const auto& c : report.checks)
            if (!c.passed) err << "check failed: " << c.name << '\n';
        return static_cast<int>(exit_validation_failed);
    });
}

int cmd_convergence(const CommandOptions& opts, std::ostream& log, std::ostream& err)
{
    return guarded(err, [&] {
        const RunConfig cfg = load(opts);
        const auto& cs = cfg.convergence;
        if (cs.n_list.size() < 3)
            throw ConfigError("config.convergence.n_list: need at least 3 grids, got " +
                              std::to_string(cs.n_list.size()));
        const auto params = cfg.model.build();
        const auto dist = cfg.jumps.build();

        TestFunction fn;
        if (cs.test_function == ConvergenceSpec::TestFn::constant) {
            fn = {[](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
        } else {
            fn = {[](double u) { return std::exp(-u); }, [](double u) { return -std::exp(-u); },
                  [](double u) { return std::exp(-u); }};
        }
        std::vector<Grid> grids;
        for (int n : cs.n_list) grids.push_back(make_grid(cs.u_max, n));
        const auto conv = convergence_study(params, dist, fn, grids, cs.probe_lo, cs.probe_hi, cs.scheme);

        std::ostringstream csv;
        csv << "h,error\n";
        for (std::size_t k = 0; k < conv.h.size(); ++k)
            csv << format_double(conv.h[k]) << ',' << format_double(conv.error[k]) << '\n';
        if (conv.exact) csv << "order,exact\n";
        else if (conv.order) csv << "order," << format_double(*conv.order) << '\n';
        else csv << "order,undefined\n";

        const auto slope = tail_slope(run_solver(cfg, params, dist));
        csv << "tail_slope_exploratory," << (slope ? format_double(*slope) : std::string("undefined")) << '\n';
        write_file(opts.out, csv.str());
        log << csv.str();
        return static_cast<int>(exit_ok);
    });
}

} // namespace survival::cli
