#include "survival/solver.hpp"

#include "survival/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace survival {

void SolverConfig::validate() const
{
    if (!(tol > 0.0)) throw ModelError("solver: tol must be > 0");
    if (max_iter < 1) throw ModelError("solver: max_iter must be >= 1");
    if (!(umax_factor > 1.0)) throw ModelError("solver: umax_factor must be > 1");
    if (!(umax_tol > 0.0)) throw ModelError("solver: umax_tol must be > 0");
    if (max_extensions < 1) throw ModelError("solver: max_extensions must be >= 1");
}

Grid GridSpec::build(const ModelParams& params) const
{
    std::optional<double> cluster;
    if (cluster_at_drift_root && params.c() > 0.0 && params.a() > 0.0) {
        const double root = params.c() / params.a();
        if (root < u_max) cluster = root;
    }
    return make_grid(u_max, n, stretch, cluster);
}

namespace {

// LU factors of the interior matrix. Row r (node r + 1) of U covers columns
// r..M-1; `lower[r]` is the multiplier that eliminated entry (r, r-1).
struct HessenbergFactors {
    std::vector<std::vector<double>> upper;
    std::vector<double> lower;

    std::vector<double> solve(std::vector<double> b) const
    {
        const std::size_t m = upper.size();
        for (std::size_t r = 1; r < m; ++r) b[r] -= lower[r] * b[r - 1];
        std::vector<double> x(m, 0.0);
        for (std::size_t r = m; r-- > 0;) {
            const auto& row = upper[r];
            long double acc = b[r];
            for (std::size_t c = r + 1; c < m; ++c) acc -= static_cast<long double>(row[c - r]) * x[c];
            x[r] = static_cast<double>(acc / row[0]);
        }
        return x;
    }
};

HessenbergFactors factorize(const DiscreteOperator& op)
{
    const std::size_t n_nodes = op.grid().size();
    const std::size_t m = n_nodes - 2;
    HessenbergFactors f;
    f.upper.resize(m);
    f.lower.assign(m, 0.0);
    std::vector<double> below(m, 0.0);

    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = r + 1;
        const auto w = op.nonlocal(i);
        auto& row = f.upper[r];
        row.assign(m - r, 0.0);
        row[0] = op.diag(i) + w[0];
        if (r + 1 < m) row[1] = op.super(i) + w[1];
        for (std::size_t k = 2; r + k < m; ++k) row[k] = w[k];
        if (r > 0) below[r] = op.sub(i);
    }

    for (std::size_t r = 0; r + 1 < m; ++r) {
        const auto& piv_row = f.upper[r];
        const double pivot = piv_row[0];
        double scale = 0.0;
        for (double v : piv_row) scale = std::max(scale, std::abs(v));
        if (!std::isfinite(pivot) || !(std::abs(pivot) > 1e-14 * scale))
            throw NumericalError("direct solve: pivot breakdown at node " + std::to_string(r + 1) +
                                 " (pivot " + std::to_string(pivot) + ")");
        const double mult = below[r + 1] / pivot;
        f.lower[r + 1] = mult;
        if (mult == 0.0) continue;
        auto& next = f.upper[r + 1];
        for (std::size_t c = r + 1; c < m; ++c) next[c - r - 1] -= mult * piv_row[c - r];
    }
    const double last = f.upper[m - 1][0];
    if (!std::isfinite(last) || last == 0.0)
        throw NumericalError("direct solve: pivot breakdown at node " + std::to_string(m));
    return f;
}

GridFunction with_boundary(std::vector<double> interior, double bc0, double bc_far)
{
    GridFunction g;
    g.values.reserve(interior.size() + 2);
    g.values.push_back(bc0);
    g.values.insert(g.values.end(), interior.begin(), interior.end());
    g.values.push_back(bc_far);
    g.far_field = bc_far;
    return g;
}

double sup_diff(const std::vector<double>& x, const std::vector<double>& y, std::size_t count)
{
    double d = 0.0;
    for (std::size_t i = 0; i < count; ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

std::vector<std::string> model_warnings(const ModelParams& params, const JumpDistribution& dist)
{
    std::vector<std::string> w;
    if (params.payout_free())
        w.emplace_back("payout-free diagnostic mode (c = 0): the origin is inaccessible and the survival "
                       "probability is identically 1 on (0, inf)");
    if (auto s = dist.support_warning(); !s.empty()) w.push_back(std::move(s));
    return w;
}

} // namespace

struct LinearSolver::Factors {
    HessenbergFactors lu;
};

LinearSolver::LinearSolver(const DiscreteOperator& op)
    : op_(&op), factors_(std::make_unique<Factors>(Factors{factorize(op)}))
{
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

GridFunction LinearSolver::solve(std::span<const double> rhs, double bc0, double bc_far) const
{
    const DiscreteOperator& op = *op_;
    const std::size_t n_nodes = op.grid().size();
    const std::size_t last = n_nodes - 1;
    const std::size_t m = n_nodes - 2;
    if (!rhs.empty() && rhs.size() != n_nodes)
        throw ModelError("solve_linear: rhs size does not match the grid");

    std::vector<double> b(m, 0.0);
    for (std::size_t i = 1; i < last; ++i) {
        const auto w = op.nonlocal(i);
        double v = rhs.empty() ? 0.0 : rhs[i];
        if (i == 1) v -= op.sub(i) * bc0;
        if (i == last - 1) v -= op.super(i) * bc_far;
        v -= w[last - i] * bc_far;
        v -= op.tail(i) * bc_far;
        b[i - 1] = v;
    }

    const HessenbergFactors& factors = factors_->lu;
    GridFunction phi = with_boundary(factors.solve(b), bc0, bc_far);

    // Residual correction with the residual accumulated in extended precision.
    for (int step = 0; step < 2; ++step) {
        GridFunction res = apply(op, phi);
        std::vector<double> correction_rhs(m);
        double worst = 0.0;
        for (std::size_t i = 1; i < last; ++i) {
            const double r = res.values[i] - (rhs.empty() ? 0.0 : rhs[i]);
            correction_rhs[i - 1] = -r;
            worst = std::max(worst, std::abs(r));
        }
        if (worst == 0.0) break;
        const auto delta = factors.solve(std::move(correction_rhs));
        for (std::size_t r = 0; r < m; ++r) phi.values[r + 1] += delta[r];
    }
    return phi;
}

GridFunction solve_linear(const DiscreteOperator& op, std::span<const double> rhs, double bc0, double bc_far)
{
    return LinearSolver(op).solve(rhs, bc0, bc_far);
}

Solution solve_direct(const DiscreteOperator& op, double bc0, double bc_far)
{
    Solution s{.grid = op.grid(), .phi = solve_linear(op, {}, bc0, bc_far)};
    s.residual_norm = sup_norm_interior(op, apply(op, s.phi));
    s.iterations = 1;
    s.u_max_used = op.grid().u_max();
    return s;
}

GridFunction local_resolvent(const LocalStencil& stencil, const GridFunction& f, double bc0, double bc_far)
{
    const std::size_t n_nodes = stencil.diag.size();
    if (f.values.size() != n_nodes) throw ModelError("local_resolvent: forcing does not match the grid");
    const std::size_t last = n_nodes - 1;
    const std::size_t m = n_nodes - 2;

    // Thomas algorithm on rows 1..N-1.
    std::vector<double> c_prime(m), d_prime(m);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = r + 1;
        double rhs = f.values[i];
        if (i == 1) rhs -= stencil.sub[i] * bc0;
        if (i == last - 1) rhs -= stencil.super[i] * bc_far;
        const double a = r > 0 ? stencil.sub[i] : 0.0;
        const double denom = stencil.diag[i] - (r > 0 ? a * c_prime[r - 1] : 0.0);
        if (!std::isfinite(denom) || denom == 0.0)
            throw NumericalError("local resolvent: pivot breakdown at node " + std::to_string(i));
        c_prime[r] = (i == last - 1) ? 0.0 : stencil.super[i] / denom;
        d_prime[r] = (rhs - (r > 0 ? a * d_prime[r - 1] : 0.0)) / denom;
    }
    std::vector<double> x(m);
    x[m - 1] = d_prime[m - 1];
    for (std::size_t r = m - 1; r-- > 0;) x[r] = d_prime[r] - c_prime[r] * x[r + 1];
    return with_boundary(std::move(x), bc0, bc_far);
}

GridFunction local_resolvent(const ModelParams& params, const Grid& grid, const GridFunction& f, double bc0,
                             double bc_far, Scheme scheme)
{
    return local_resolvent(make_local_stencil(params, grid, scheme), f, bc0, bc_far);
}

Solution solve_picard(const DiscreteOperator& op, const SolverConfig& cfg, std::optional<std::vector<double>> initial)
{
    cfg.validate();
    constexpr double bc0 = 0.0;
    constexpr double bc_far = 1.0;
    const std::size_t n_nodes = op.grid().size();
    const std::size_t last = n_nodes - 1;

    GridFunction phi;
    phi.values.assign(n_nodes, 0.0);
    if (initial) {
        if (initial->size() != n_nodes) throw ModelError("solve_picard: initial guess does not match the grid");
        phi.values = *initial;
    }
    phi.values.front() = bc0;
    phi.values.back() = bc_far;
    phi.far_field = bc_far;

    Solution s{.grid = op.grid()};
    GridFunction forcing;
    forcing.values.assign(n_nodes, 0.0);
    double delta = 0.0;
    for (int k = 1; k <= cfg.max_iter; ++k) {
        for (std::size_t i = 1; i < last; ++i) {
            const auto w = op.nonlocal(i);
            long double acc = static_cast<long double>(op.tail(i)) * phi.far_field;
            for (std::size_t j = 0; j < w.size(); ++j) acc += static_cast<long double>(w[j]) * phi.values[i + j];
            forcing.values[i] = -static_cast<double>(acc);
        }
        GridFunction next = local_resolvent(op.local(), forcing, bc0, bc_far);
        delta = sup_diff(next.values, phi.values, n_nodes);
        phi = std::move(next);
        // Once the change ratio settles, delta * rho / (1 - rho) bounds the
        // distance to the fixed point; require that as well as delta < tol.
        const double prev = s.diagnostics.empty() ? 0.0 : s.diagnostics.back().sup_delta;
        const double rho = prev > 0.0 ? delta / prev : 1.0;
        const double remaining = rho < 1.0 ? delta * rho / (1.0 - rho) : delta;
        s.diagnostics.push_back({k, delta, op.grid().u_max()});
        s.iterations = k;
        if (delta == 0.0 || (delta < cfg.tol && remaining < cfg.tol)) {
            s.phi = std::move(phi);
            s.residual_norm = sup_norm_interior(op, apply(op, s.phi));
            s.u_max_used = op.grid().u_max();
            return s;
        }
    }
    throw NumericalError("picard iteration did not converge in " + std::to_string(cfg.max_iter) +
                         " iterations (last sup-norm change " + std::to_string(delta) + ")");
}

Solution solve_picard(const ModelParams& params, const JumpDistribution& dist, const Grid& grid,
                      const SolverConfig& cfg, std::optional<std::vector<double>> initial)
{
    Solution s = solve_picard(assemble(params, dist, grid, cfg.scheme), cfg, std::move(initial));
    s.warnings = model_warnings(params, dist);
    return s;
}

Solution solve(const ModelParams& params, const JumpDistribution& dist, const Grid& grid, const SolverConfig& cfg)
{
    cfg.validate();
    if (cfg.method == Method::picard) return solve_picard(params, dist, grid, cfg);
    Solution s = solve_direct(assemble(params, dist, grid, cfg.scheme));
    s.warnings = model_warnings(params, dist);
    return s;
}

Solution solve_adaptive(const ModelParams& params, const JumpDistribution& dist, const SolverConfig& cfg,
                        const GridSpec& base)
{
    cfg.validate();
    Grid grid = base.build(params);
    Solution current = solve(params, dist, grid, cfg);
    std::vector<IterationRecord> history;

    for (int ext = 1; ext <= cfg.max_extensions; ++ext) {
        Grid wider = extend_grid(grid, cfg.umax_factor * grid.u_max());
        Solution next = solve(params, dist, wider, cfg);
        const double change = sup_diff(next.phi.values, current.phi.values, grid.size());
        history.push_back({ext, change, wider.u_max()});
        if (change < cfg.umax_tol) {
            next.diagnostics.insert(next.diagnostics.begin(), history.begin(), history.end());
            next.u_max_used = wider.u_max();
            return next;
        }
        grid = std::move(wider);
        current = std::move(next);
    }
    throw NumericalError("adaptive truncation did not stabilise after " + std::to_string(cfg.max_extensions) +
                         " enlargements (last change " + std::to_string(history.back().sup_delta) +
                         " at U_max = " + std::to_string(history.back().u_max) + ")");
}

std::optional<double> tail_slope(const Solution& solution)
{
    const auto u = solution.grid.nodes();
    const double lo = solution.grid.u_max() / 16.0;
    const double hi = solution.grid.u_max() / 4.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (std::size_t i = 1; i < u.size(); ++i) {
        const double gap = 1.0 - solution.phi.values[i];
        if (u[i] < lo || u[i] > hi || !(gap > 1e-14)) continue;
        const double x = std::log(u[i]);
        const double y = std::log(gap);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 3) return std::nullopt;
    const double denom = count * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    return (count * sxy - sx * sy) / denom;
}

} // namespace survival
