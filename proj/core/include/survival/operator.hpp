#pragma once

#include "survival/grid.hpp"
#include "survival/jumps.hpp"
#include "survival/model.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace survival {

enum class Scheme {
    central,      // three-point central differences everywhere
    upwind_auto,  // central unless the cell Peclet number exceeds 1
};

// Three-point rows of A(u) phi'' + B(u) phi' - lambda phi at nodes 1..N-1
// (entries 0 and N unused).
struct LocalStencil {
    std::vector<double> sub, diag, super;
    std::vector<char> upwinded;
};

LocalStencil make_local_stencil(const ModelParams& params, const Grid& grid, Scheme scheme);

// Discretisation of
//
//   L phi(u) = A(u) phi'' + B(u) phi' + lambda * int [phi(u + y) - phi(u)] dF(y)
//
// with A(u) = sigma^2 u^2 / 2 and B(u) = a u - c, on the interior nodes
// 1..N-1 of a grid. Values beyond U_max are replaced by a far-field constant.
//
// Row i reads
//   sub_i phi_{i-1} + diag_i phi_i + super_i phi_{i+1}
//     + sum_{j >= i} w_{ij} phi_j + tail_i * far_field.
// `diag` already contains the -lambda zero-order term, so for every row
// sub + diag + super = -lambda and sum_j w_ij + tail_i = lambda.
class DiscreteOperator {
public:
    DiscreteOperator(ModelParams params, Grid grid, Scheme scheme);

    const ModelParams& params() const noexcept { return params_; }
    const Grid& grid() const noexcept { return grid_; }
    Scheme scheme() const noexcept { return scheme_; }

    // Row accessors use node indices i in [1, N-1].
    double sub(std::size_t i) const { return local_.sub[i]; }
    double diag(std::size_t i) const { return local_.diag[i]; }
    double super(std::size_t i) const { return local_.super[i]; }
    double tail(std::size_t i) const { return tail_[i]; }
    bool upwinded(std::size_t i) const { return local_.upwinded[i] != 0; }
    const LocalStencil& local() const noexcept { return local_; }
    // Nonlocal weights of row i for nodes j = i..N; element k is w_{i,i+k}.
    std::span<const double> nonlocal(std::size_t i) const { return nonlocal_[i]; }

    std::size_t interior_begin() const noexcept { return 1; }
    std::size_t interior_end() const noexcept { return grid_.cells(); }

private:
    friend DiscreteOperator assemble(const ModelParams&, const JumpDistribution&, const Grid&, Scheme);

    ModelParams params_;
    Grid grid_;
    Scheme scheme_;
    LocalStencil local_;
    std::vector<double> tail_;
    std::vector<std::vector<double>> nonlocal_;
};

DiscreteOperator assemble(const ModelParams& params, const JumpDistribution& dist, const Grid& grid,
                          Scheme scheme = Scheme::upwind_auto);

// (L_h phi)_i at interior nodes; boundary entries are 0. The far field of
// the result is 0. Throws ModelError when phi does not match the grid.
GridFunction apply(const DiscreteOperator& op, const GridFunction& phi);

// Largest |residual| over interior nodes.
double sup_norm_interior(const DiscreteOperator& op, const GridFunction& residual);

// Bounded C^2 test function with its first two derivatives.
struct TestFunction {
    std::function<double(double)> value;
    std::function<double(double)> first;
    std::function<double(double)> second;
};

// L phi(u) with the nonlocal part written as int_0^inf phi'(u + y) (1 - F(y)) dy
// and evaluated by adaptive Gauss-Kronrod quadrature to 1e-10 absolute
// tolerance. `breakpoints` are absolute u-locations where phi' may jump;
// atoms of the jump law are added automatically.
// Throws NumericalError when the quadrature does not reach the tolerance.
double reference_apply(const ModelParams& params, const JumpDistribution& dist, const TestFunction& phi,
                       double u, std::span<const double> breakpoints = {});

// Result of the monotone-scheme sign audit.
struct SignAudit {
    bool ok = true;
    std::size_t first_bad_row = 0;
    double worst_margin = 0.0;      // min over rows of -(diag) - sum(off) - tail, scaled
    double worst_offdiag = 0.0;     // most negative off-diagonal entry seen
    double worst_mass_error = 0.0;  // max |sum w + tail - lambda|
};

// Checks nonnegative off-diagonals, weak diagonal dominance and row mass.
SignAudit audit_signs(const DiscreteOperator& op);

// Writes (row,col,value,tail) triplets of the combined matrix; col is a node
// index and the tail column is repeated on every entry of the row.
void write_operator_csv(const DiscreteOperator& op, std::ostream& os);

} // namespace survival
