#pragma once

#include "survival/simulator.hpp"
#include "survival/solver.hpp"

#include <iosfwd>
#include <string>

namespace survival {

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

// Header `u,phi`, one row per node, then `inf,<far field>`.
void write_solution_csv(const Solution& solution, std::ostream& os);

// {iterations, deltas, u_max_used, residual_norm, ...} as a JSON document.
std::string solution_diagnostics_json(const Solution& solution);

// {lower, upper, stderr, n_paths, indeterminate} as a JSON document.
std::string estimate_json(const SurvivalEstimate& estimate);

} // namespace survival
