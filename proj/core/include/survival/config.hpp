#pragma once

#include "survival/jumps.hpp"
#include "survival/model.hpp"
#include "survival/simulator.hpp"
#include "survival/solver.hpp"
#include "survival/validation.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace survival {

struct ModelSpec {
    double a = 0.0, sigma = 0.0, c = 0.0, lambda = 0.0;
    ModelParams build() const { return {a, sigma, c, lambda}; }
};

struct JumpSpec {
    enum class Type { exponential, gamma, empirical };
    Type type = Type::exponential;
    double rate = 1.0;
    double shape = 1.0;
    double scale = 1.0;
    std::vector<std::pair<double, double>> points;

    JumpDistribution build() const;
};

struct ConvergenceSpec {
    enum class TestFn { exp_decay, constant };
    TestFn test_function = TestFn::exp_decay;
    std::vector<int> n_list{100, 200, 400};
    double u_max = 10.0;
    double probe_lo = 1.0;
    double probe_hi = 4.0;
    Scheme scheme = Scheme::upwind_auto;
};

struct OutputSpec {
    std::string diagnostics;   // solve: diagnostics JSON (default: next to the CSV)
    std::string paths_csv;     // simulate: optional per-path audit CSV
    std::string operator_csv;  // solve: optional operator dump
};

// Everything a CLI run needs. Produced only by parse_run_config, which checks
// the schema, rejects unknown keys and validates every block.
struct RunConfig {
    ModelSpec model;
    JumpSpec jumps;
    GridSpec grid;
    SolverConfig solver;
    bool adaptive = true;
    SimConfig sim;
    bool barrier_auto = true;
    double barrier_slack = 1e-3;
    ValidationPlan validation;
    ConvergenceSpec convergence;
    OutputSpec output;
};

// Throws ConfigError describing the first problem found (including model
// violations such as gamma <= 1).
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

} // namespace survival
