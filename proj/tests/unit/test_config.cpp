#include <doctest.h>

#include <survival/config.hpp>
#include <survival/errors.hpp>

#include <string>

using namespace survival;

namespace {

const char* minimal = R"({
  "model": {"a": 0.15, "sigma": 0.3, "c": 1, "lambda": 2},
  "jumps": {"type": "exponential", "rate": 1}
})";

std::string with(const std::string& extra)
{
    std::string s = minimal;
    s.insert(s.rfind('}'), ", " + extra);
    return s;
}

std::string error_of(const std::string& text)
{
    try {
        parse_run_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("defaults")
{
    const auto cfg = parse_run_config(minimal);
    CHECK(cfg.model.a == 0.15);
    CHECK(cfg.jumps.type == JumpSpec::Type::exponential);
    CHECK(cfg.solver.method == Method::direct);
    CHECK(cfg.adaptive);
    CHECK(cfg.barrier_auto);
    CHECK(cfg.sim.n_paths == 100000);
    CHECK(cfg.validation.informed_barrier);
}

TEST_CASE("every block is read and propagated to the validation plan")
{
    const auto cfg = parse_run_config(with(R"(
      "grid": {"u_max": 30, "n": 300, "stretch": 10, "cluster_at_drift_root": false},
      "solver": {"method": "picard", "tol": 1e-9, "max_iter": 900, "scheme": "central", "adaptive": false},
      "sim": {"dt": 0.002, "n_paths": 500, "t_max": 50, "barrier": 12.5, "seed": 3, "threads": 2},
      "validation": {"u_list": [1, 3], "allowance": 0.02, "consistency_n": [50, 100, 200, 400]},
      "convergence": {"test_function": "constant", "n_list": [10, 20, 40], "probe": [2, 3]},
      "output": {"diagnostics": "d.json", "paths_csv": "p.csv", "operator_csv": "o.csv"})"));
    CHECK(cfg.grid.n == 300);
    CHECK_FALSE(cfg.grid.cluster_at_drift_root);
    CHECK(cfg.solver.method == Method::picard);
    CHECK(cfg.solver.scheme == Scheme::central);
    CHECK_FALSE(cfg.adaptive);
    CHECK_FALSE(cfg.barrier_auto);
    CHECK(cfg.sim.barrier == 12.5);
    CHECK(cfg.sim.seed == 3);
    CHECK(cfg.validation.sim.seed == 3);
    CHECK(cfg.validation.solver.max_iter == 900);
    CHECK(cfg.validation.grid.u_max == 30);
    CHECK_FALSE(cfg.validation.informed_barrier);
    CHECK(cfg.validation.u_list == std::vector<double>{1, 3});
    CHECK(cfg.validation.consistency_n.size() == 4);
    CHECK(cfg.convergence.test_function == ConvergenceSpec::TestFn::constant);
    CHECK(cfg.convergence.probe_lo == 2);
    CHECK(cfg.output.paths_csv == "p.csv");
}

TEST_CASE("jump laws")
{
    auto cfg = parse_run_config(R"({"model": {"a": 0.15, "sigma": 0.3, "c": 1, "lambda": 2},
                                    "jumps": {"type": "gamma", "shape": 2, "scale": 0.5}})");
    CHECK(cfg.jumps.build().mean() == doctest::Approx(1.0));
    cfg = parse_run_config(R"({"model": {"a": 0.15, "sigma": 0.3, "c": 1, "lambda": 2},
                               "jumps": {"type": "empirical", "points": [[1, 0.5], [2, 0.5]]}})");
    CHECK(cfg.jumps.build().mean() == doctest::Approx(1.5));
    CHECK_FALSE(error_of(R"({"model": {"a": 0.15, "sigma": 0.3, "c": 1, "lambda": 2},
                             "jumps": {"type": "empirical", "points": [[1, 0.5], [2, 0.4]]}})")
                    .empty());
    CHECK_FALSE(error_of(R"({"model": {"a": 0.15, "sigma": 0.3, "c": 1, "lambda": 2},
                             "jumps": {"type": "pareto"}})")
                    .empty());
}

TEST_CASE("schema violations")
{
    CHECK(error_of("{").find("JSON") != std::string::npos);
    CHECK(error_of(R"({"jumps": {"type": "exponential"}})").find("config.model") != std::string::npos);
    CHECK(error_of(with(R"("extra": 1)")).find("extra") != std::string::npos);
    CHECK(error_of(with(R"("grid": {"n": 100, "nn": 3})")).find("config.grid.nn") != std::string::npos);
    CHECK(error_of(with(R"("sim": {"seed": -1})")).find("seed") != std::string::npos);
    CHECK(error_of(with(R"("sim": {"n_paths": 0})")).find("n_paths") != std::string::npos);
    CHECK(error_of(with(R"("sim": {"barrier": "high"})")).find("barrier") != std::string::npos);
    CHECK(error_of(with(R"("solver": {"method": "newton"})")).find("method") != std::string::npos);
    CHECK(error_of(with(R"("grid": {"n": "many"})")).find("config.grid.n") != std::string::npos);
    CHECK(error_of(with(R"("validation": {"consistency_probe": [4, 1]})")).find("consistency_probe") !=
          std::string::npos);
}

TEST_CASE("model violations surface as configuration errors")
{
    const auto msg = error_of(R"({"model": {"a": 0.045, "sigma": 0.3, "c": 1, "lambda": 2},
                                  "jumps": {"type": "exponential"}})");
    CHECK(msg.find("net-profit") != std::string::npos);
    CHECK_FALSE(error_of(R"({"model": {"a": 0.15, "sigma": 0.3, "c": -1, "lambda": 2},
                             "jumps": {"type": "exponential"}})")
                    .empty());
}

TEST_CASE("missing file")
{
    CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
}
