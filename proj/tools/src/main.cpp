#include "survival_cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace survival::cli;

    CLI::App app{"Survival probability of a surplus process with annuity payments, investment and jumps"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app;
        CommandOptions opts;
        int (*run)(const CommandOptions&, std::ostream&, std::ostream&);
    };
    Sub subs[] = {
        {app.add_subcommand("solve", "Solve for phi on the grid; writes u,phi CSV and diagnostics JSON"), {}, cmd_solve},
        {app.add_subcommand("simulate", "Monte Carlo survival bracket at --u; writes JSON"), {}, cmd_simulate},
        {app.add_subcommand("validate", "Run the validation report; writes JSON"), {}, cmd_validate},
        {app.add_subcommand("convergence", "Operator consistency study; writes h,error CSV"), {}, cmd_convergence},
    };
    for (auto& s : subs) {
        s.app->add_option("--config", s.opts.config, "JSON run configuration")->required();
        s.app->add_option("--out", s.opts.out, "Output file")->required();
        s.app->add_option("--seed", s.opts.seed, "Override sim.seed");
        s.app->add_option("--threads", s.opts.threads, "Worker threads (0 = all cores); overrides SURVIVAL_THREADS");
    }
    subs[1].app->add_option("--u", subs[1].opts.u, "Initial capital")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config_error;
    }
    for (auto& s : subs)
        if (s.app->parsed()) return s.run(s.opts, std::cout, std::cerr);
    return exit_config_error;
}
