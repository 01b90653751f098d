#include <doctest.h>

#include "support.hpp"

#include <survival_cli/commands.hpp>

#include <json.hpp>

#include <cstdlib>
#include <sstream>

using namespace survival::cli;
namespace fs = std::filesystem;

namespace {

const fs::path configs = SURVIVAL_CONFIG_DIR;

struct Run {
    int code;
    std::string log;
    std::string err;
};

Run run(int (*cmd)(const CommandOptions&, std::ostream&, std::ostream&), const CommandOptions& opts)
{
    std::ostringstream log, err;
    const int code = cmd(opts, log, err);
    return {code, log.str(), err.str()};
}

// Acceptance config with a reduced path budget and extra settings.
fs::path small_config(const fs::path& dir, const std::string& name, const nlohmann::json& patch = {},
                      const fs::path& base = configs / "acceptance.json")
{
    auto cfg = nlohmann::json::parse(testing::slurp(base));
    cfg["sim"]["n_paths"] = 1000;
    cfg["validation"]["comparison_trials"] = 10;
    cfg["validation"]["lemma1_samples"] = 1000;
    if (!patch.is_null()) cfg.merge_patch(patch);
    const auto path = dir / name;
    testing::spit(path, cfg.dump());
    return path;
}

std::size_t count_lines(const std::string& s)
{
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

} // namespace

TEST_CASE("solve writes N+2 CSV rows and diagnostics")
{
    const auto dir = testing::scratch_dir("cli_solve");
    const auto r = run(cmd_solve, {(configs / "acceptance.json").string(), (dir / "phi.csv").string()});
    REQUIRE(r.code == exit_ok);
    const auto csv = testing::slurp(dir / "phi.csv");
    const auto diag = nlohmann::json::parse(testing::slurp(dir / "phi.diagnostics.json"));
    const auto nodes = diag["nodes"].get<std::size_t>();
    CHECK(count_lines(csv) == nodes + 2);
    CHECK(csv.rfind("u,phi\n0,0\n", 0) == 0);
    CHECK(csv.find("\ninf,1\n") != std::string::npos);
    CHECK(diag["residual_norm"].get<double>() <= 1e-10);
    CHECK(diag.contains("deltas"));
    CHECK(diag.contains("tail_slope_exploratory"));
}

TEST_CASE("solve with operator dump and explicit diagnostics path")
{
    const auto dir = testing::scratch_dir("cli_solve_dump");
    const auto cfg = small_config(dir, "c.json",
                                  {{"solver", {{"adaptive", false}}},
                                   {"grid", {{"n", 100}, {"u_max", 20}}},
                                   {"output", {{"diagnostics", (dir / "d.json").string()},
                                               {"operator_csv", (dir / "op.csv").string()}}}});
    const auto r = run(cmd_solve, {cfg.string(), (dir / "phi.csv").string()});
    REQUIRE(r.code == exit_ok);
    CHECK(fs::exists(dir / "d.json"));
    CHECK(testing::slurp(dir / "op.csv").rfind("row,col,value,tail\n", 0) == 0);
}

TEST_CASE("configuration errors exit with 2")
{
    const auto dir = testing::scratch_dir("cli_errors");
    auto r = run(cmd_solve, {(dir / "missing.json").string(), (dir / "phi.csv").string()});
    CHECK(r.code == exit_config_error);

    const auto bad = small_config(dir, "bad.json", {{"model", {{"a", 0.04}}}});
    r = run(cmd_solve, {bad.string(), (dir / "phi.csv").string()});
    CHECK(r.code == exit_config_error);
    CHECK(r.err.find("net-profit") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "phi.csv"));

    const auto zero = small_config(dir, "zero.json", {{"sim", {{"n_paths", 0}}}});
    CommandOptions opts{zero.string(), (dir / "e.json").string()};
    opts.u = 1.0;
    CHECK(run(cmd_simulate, opts).code == exit_config_error);

    opts.config = small_config(dir, "ok.json").string();
    opts.u.reset();
    CHECK(run(cmd_simulate, opts).code == exit_config_error);
    opts.u = -1.0;
    CHECK(run(cmd_simulate, opts).code == exit_config_error);
    opts.u = 1.0;
    opts.out.clear();
    CHECK(run(cmd_simulate, opts).code == exit_config_error);
}

TEST_CASE("numerical failure exits with 3")
{
    const auto dir = testing::scratch_dir("cli_numerical");
    const auto cfg = small_config(dir, "c.json", {{"solver", {{"method", "picard"}, {"max_iter", 3}}}});
    const auto r = run(cmd_solve, {cfg.string(), (dir / "phi.csv").string()});
    CHECK(r.code == exit_numerical_failure);
    CHECK(r.err.find("numerical failure") != std::string::npos);
}

TEST_CASE("simulate: payout-free bracket and determinism")
{
    const auto dir = testing::scratch_dir("cli_simulate");
    CommandOptions opts{(configs / "payout_free.json").string(), (dir / "a.json").string()};
    opts.u = 0.7;
    opts.threads = 1;
    REQUIRE(run(cmd_simulate, opts).code == exit_ok);
    const auto est = nlohmann::json::parse(testing::slurp(dir / "a.json"));
    CHECK(est["lower"] == 1.0);
    CHECK(est["upper"] == 1.0);
    CHECK(est["indeterminate"] == 0);
    CHECK(est.contains("stderr"));

    const auto cfg = small_config(dir, "c.json", {{"output", {{"paths_csv", (dir / "paths.csv").string()}}}});
    opts.config = cfg.string();
    opts.u = 1.0;
    REQUIRE(run(cmd_simulate, opts).code == exit_ok);
    const auto first = testing::slurp(dir / "a.json");
    const auto first_paths = testing::slurp(dir / "paths.csv");
    opts.out = (dir / "b.json").string();
    opts.threads = 4;
    REQUIRE(run(cmd_simulate, opts).code == exit_ok);
    CHECK(testing::slurp(dir / "b.json") == first);
    CHECK(testing::slurp(dir / "paths.csv") == first_paths);
    CHECK(count_lines(first_paths) == 1001);

    opts.seed = 5;
    opts.out = (dir / "c.json").string();
    REQUIRE(run(cmd_simulate, opts).code == exit_ok);
    CHECK(testing::slurp(dir / "c.json") != first);
}

TEST_CASE("validate: pass, forced failure and support warning")
{
    const auto dir = testing::scratch_dir("cli_validate");
    const auto ok = small_config(dir, "ok.json");
    auto r = run(cmd_validate, {ok.string(), (dir / "ok_report.json").string()});
    CHECK_MESSAGE(r.code == exit_ok, r.log);
    CHECK(nlohmann::json::parse(testing::slurp(dir / "ok_report.json"))["passed"] == true);

    const auto broken = small_config(dir, "broken.json", {{"validation", {{"allowance", 0.0}}}});
    r = run(cmd_validate, {broken.string(), (dir / "broken_report.json").string()});
    CHECK(r.code == exit_validation_failed);
    CHECK(r.err.find("check failed: discretization_allowance_covers_richardson") != std::string::npos);
    const auto report = nlohmann::json::parse(testing::slurp(dir / "broken_report.json"));
    CHECK(report["passed"] == false);

    const auto emp = small_config(dir, "emp.json", {}, configs / "empirical.json");
    r = run(cmd_validate, {emp.string(), (dir / "emp_report.json").string()});
    CHECK_MESSAGE(r.code == exit_ok, r.log);
    const auto emp_report = nlohmann::json::parse(testing::slurp(dir / "emp_report.json"));
    REQUIRE(emp_report["warnings"].size() == 1);
    CHECK(emp_report["warnings"][0].get<std::string>().find("support") != std::string::npos);
}

TEST_CASE("convergence: rows, order and tail slope")
{
    const auto dir = testing::scratch_dir("cli_convergence");
    auto r = run(cmd_convergence, {(configs / "acceptance.json").string(), (dir / "conv.csv").string()});
    REQUIRE(r.code == exit_ok);
    std::istringstream in(testing::slurp(dir / "conv.csv"));
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "h,error");
    CHECK(lines[4].rfind("order,", 0) == 0);
    CHECK(std::stod(lines[4].substr(6)) >= 1.8);
    CHECK(lines[5].rfind("tail_slope_exploratory,", 0) == 0);

    const auto two = small_config(dir, "two.json", {{"convergence", {{"n_list", {100, 200}}}}});
    CHECK(run(cmd_convergence, {two.string(), (dir / "two.csv").string()}).code == exit_config_error);

    const auto constant = small_config(dir, "const.json", {{"convergence", {{"test_function", "constant"}}}});
    REQUIRE(run(cmd_convergence, {constant.string(), (dir / "const.csv").string()}).code == exit_ok);
    CHECK(testing::slurp(dir / "const.csv").find("\norder,exact\n") != std::string::npos);
}

TEST_CASE("thread count precedence")
{
    ::unsetenv("SURVIVAL_THREADS");
    CHECK(effective_threads(std::nullopt, 3) == 3);
    ::setenv("SURVIVAL_THREADS", "2", 1);
    CHECK(effective_threads(std::nullopt, 3) == 2);
    CHECK(effective_threads(5, 3) == 5);
    ::setenv("SURVIVAL_THREADS", "two", 1);
    CHECK_THROWS(effective_threads(std::nullopt, 3));
    ::unsetenv("SURVIVAL_THREADS");
}
