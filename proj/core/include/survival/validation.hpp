#pragma once

#include "survival/grid.hpp"
#include "survival/jumps.hpp"
#include "survival/model.hpp"
#include "survival/operator.hpp"
#include "survival/random.hpp"
#include "survival/simulator.hpp"
#include "survival/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace survival {

struct CheckEntry {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string relation;  // how measured is compared with tolerance, e.g. "<=", ">="
    double runtime_seconds = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckEntry> checks;
    std::vector<std::string> warnings;

    // False when any check failed or when there are no checks at all.
    bool passed() const;
    void add(CheckEntry entry) { checks.push_back(std::move(entry)); }
    void append(const std::vector<CheckEntry>& entries);
};

std::string report_to_json(const ValidationReport& report);
void print_table(const ValidationReport& report, std::ostream& os);

// ---------------------------------------------------------------------------
// Consistency of the discrete operator.

struct ConvergenceResult {
    std::vector<double> h;      // largest cell in the probe window
    std::vector<double> error;  // sup over probe nodes of |apply - reference_apply|
    std::optional<double> order;  // least-squares slope; nullopt when exact
    bool exact = false;           // all errors at roundoff: below 1e-13 times the largest |diag|
};

// Probe nodes are those with probe_lo <= u <= probe_hi. The test function is
// extended beyond U_max by its value at U_max. Throws ModelError for fewer
// than 3 grids or a family whose spacing does not decrease.
ConvergenceResult convergence_study(const ModelParams& params, const JumpDistribution& dist,
                                    const TestFunction& fn, const std::vector<Grid>& grids, double probe_lo,
                                    double probe_hi, Scheme scheme = Scheme::upwind_auto);

// ---------------------------------------------------------------------------
// Discrete comparison principle and uniqueness.

struct ComparisonResult {
    bool passed = true;
    int trials = 0;
    double worst_violation = 0.0;  // max over trials and nodes of U - V (<= 1e-10 to pass)
    std::size_t offending_node = 0;
    double min_strict_gap = 0.0;   // for trials with g > 0: min over trials of max(V - U)
};

// Solves L_h U = 0 and L_h V = -g for random g >= 0 and ordered boundary
// data, and checks U <= V + 1e-10 nodewise.
ComparisonResult discrete_comparison_check(const DiscreteOperator& op, int n_trials, Rng& rng);

struct UniquenessResult {
    double max_distance = 0.0;
    std::vector<int> iterations;
};

// Picard from k_starts initial guesses: 0, 1, then uniform random in [0, 1]
// drawn from `seed`. Returns the largest pairwise sup-norm distance.
UniquenessResult uniqueness_check(const DiscreteOperator& op, int k_starts, const SolverConfig& cfg,
                                  std::uint64_t seed);
UniquenessResult uniqueness_check(const ModelParams& params, const JumpDistribution& dist, const Grid& grid,
                                  int k_starts, const SolverConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Boundary behaviour and agreement with simulation.

struct BoundaryBudget {
    std::int64_t lemma1_samples = 10000;
    SimConfig sim;
    double allowance = 0.01;  // discretisation allowance delta_h
    double far_min = 0.99;
};

std::vector<CheckEntry> boundary_check(const Solution& solution, const ModelParams& params,
                                       const JumpDistribution& dist, const BoundaryBudget& budget);

// For each u asserts phi(u) in [lower - 3 se - allowance, upper + 3 se + allowance].
std::vector<CheckEntry> cross_validate(const Solution& solution, const ModelParams& params,
                                       const JumpDistribution& dist, const std::vector<double>& u_list,
                                       const SimConfig& sim, double allowance);

// |phi(fine) - phi(coarse)| at the coarse nodes, where the coarse grid keeps
// every other node; first-order Richardson estimate of the fine-grid error.
double richardson_estimate(const ModelParams& params, const JumpDistribution& dist, const Grid& fine,
                           const SolverConfig& cfg);

// Structural properties of a solved survival probability.
std::vector<CheckEntry> solution_checks(const Solution& solution, const DiscreteOperator& op, double tol);

// ---------------------------------------------------------------------------
// Full report.

struct ValidationPlan {
    SolverConfig solver;
    GridSpec grid;
    SimConfig sim;
    std::vector<double> u_list{0.5, 1.0, 2.0, 5.0};
    double allowance = 0.01;
    bool informed_barrier = true;
    double barrier_slack = 1e-3;
    double dpp_u = 2.0;
    double dpp_t = 1.0;
    int comparison_trials = 100;
    int uniqueness_starts = 3;
    std::int64_t lemma1_samples = 10000;
    // Consistency study on uniform grids of [0, consistency_u_max].
    std::vector<int> consistency_n{100, 200, 400};
    double consistency_u_max = 10.0;
    double consistency_probe_lo = 1.0;
    double consistency_probe_hi = 4.0;
    double consistency_min_order = 1.8;
    bool parameter_trends = true;
};

ValidationReport run_validation(const ModelParams& params, const JumpDistribution& dist,
                                const ValidationPlan& plan);

} // namespace survival
