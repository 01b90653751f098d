#pragma once

#include "survival/grid.hpp"
#include "survival/jumps.hpp"
#include "survival/model.hpp"
#include "survival/operator.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace survival {

enum class Method { direct, picard };

struct SolverConfig {
    Method method = Method::direct;
    double tol = 1e-10;           // sup-norm tolerance
    int max_iter = 200;           // Picard iterations
    double umax_factor = 2.0;     // growth factor of the adaptive truncation
    double umax_tol = 1e-6;       // pointwise change accepted between truncations
    int max_extensions = 10;      // bound on the number of U_max enlargements
    Scheme scheme = Scheme::upwind_auto;

    // Throws ModelError on tol <= 0, max_iter < 1, umax_factor <= 1, ...
    void validate() const;
};

struct GridSpec {
    double u_max = 50.0;
    int n = 800;
    double stretch = 50.0;  // ratio of the last to the first cell
    bool cluster_at_drift_root = true;  // refine around c/a

    Grid build(const ModelParams& params) const;
};

struct IterationRecord {
    int iteration = 0;
    double sup_delta = 0.0;  // Picard: ||phi^k - phi^{k-1}||; adaptive: change across U_max levels
    double u_max = 0.0;
};

struct Solution {
    Grid grid;
    GridFunction phi{};
    double residual_norm = 0.0;
    int iterations = 0;
    double u_max_used = 0.0;
    std::vector<IterationRecord> diagnostics{};
    std::vector<std::string> warnings{};

    // Linear interpolation; 0 for u <= 0, far field beyond U_max.
    double at(double u) const { return phi.at(grid, u); }
};

// Factorisation of the interior matrix of an assembled operator, reusable
// across right-hand sides and boundary data.
class LinearSolver {
public:
    // Throws NumericalError naming the pivot index on breakdown.
    explicit LinearSolver(const DiscreteOperator& op);
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    // See solve_linear.
    GridFunction solve(std::span<const double> rhs, double bc0, double bc_far) const;

private:
    struct Factors;
    const DiscreteOperator* op_;
    std::unique_ptr<Factors> factors_;
};

// Solves L_h phi = rhs at interior nodes with phi_0 = bc0, phi_N = bc_far and
// far field bc_far. rhs is indexed by node (entries 0 and N ignored); an
// empty span means zero. Gaussian elimination on the upper Hessenberg matrix
// (tridiagonal local part plus upper-triangular nonlocal part) in O(N^2),
// followed by up to two steps of residual correction.
// Throws NumericalError naming the pivot index on breakdown.
GridFunction solve_linear(const DiscreteOperator& op, std::span<const double> rhs, double bc0,
                          double bc_far);

// L_h phi = 0 with Dirichlet data; residual_norm is measured with apply().
Solution solve_direct(const DiscreteOperator& op, double bc0 = 0.0, double bc_far = 1.0);

// Solves A phi'' + B phi' - lambda phi = f on the interior (Thomas
// algorithm, O(N)) with phi_0 = bc0 and phi_N = bc_far.
GridFunction local_resolvent(const LocalStencil& stencil, const GridFunction& f, double bc0, double bc_far);
GridFunction local_resolvent(const ModelParams& params, const Grid& grid, const GridFunction& f, double bc0,
                             double bc_far, Scheme scheme = Scheme::upwind_auto);

// Fixed-point iteration phi^{k+1} = R(-J phi^k) where R is the local
// resolvent and J the nonlocal part (tail included). Starts from `initial`
// (interior values; default 0) with phi_0 = 0 and far field 1, and stops when
// the sup-norm change drops below cfg.tol and the geometric estimate of the
// remaining error, change * rho / (1 - rho) with rho the ratio of successive
// changes, is below cfg.tol as well. Throws NumericalError with the last
// change when cfg.max_iter is exhausted.
Solution solve_picard(const DiscreteOperator& op, const SolverConfig& cfg,
                      std::optional<std::vector<double>> initial = std::nullopt);
Solution solve_picard(const ModelParams& params, const JumpDistribution& dist, const Grid& grid,
                      const SolverConfig& cfg, std::optional<std::vector<double>> initial = std::nullopt);

// Dispatches on cfg.method for a fixed grid.
Solution solve(const ModelParams& params, const JumpDistribution& dist, const Grid& grid,
               const SolverConfig& cfg);

// Solves on the base grid, then on grids extended by cfg.umax_factor until
// two consecutive truncations differ by less than cfg.umax_tol at every node
// of the smaller one. Returns the solution on the larger grid.
Solution solve_adaptive(const ModelParams& params, const JumpDistribution& dist, const SolverConfig& cfg,
                        const GridSpec& base);

// Exploratory least-squares slope of log(1 - phi) against log(u) over
// u in [U_max/16, U_max/4]. nullopt when there are fewer than 3 usable nodes.
std::optional<double> tail_slope(const Solution& solution);

} // namespace survival
