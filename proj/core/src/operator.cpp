#include "survival/operator.hpp"

#include "survival/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace survival {

DiscreteOperator::DiscreteOperator(ModelParams params, Grid grid, Scheme scheme)
    : params_(params), grid_(std::move(grid)), scheme_(scheme)
{
    const std::size_t n = grid_.size();
    tail_.assign(n, 0.0);
    nonlocal_.resize(n);
}

LocalStencil make_local_stencil(const ModelParams& params, const Grid& grid, Scheme scheme)
{
    const auto u = grid.nodes();
    const std::size_t n = grid.size();
    const std::size_t last = grid.cells();
    LocalStencil s;
    s.sub.assign(n, 0.0);
    s.diag.assign(n, 0.0);
    s.super.assign(n, 0.0);
    s.upwinded.assign(n, 0);

    for (std::size_t i = 1; i < last; ++i) {
        const double hm = u[i] - u[i - 1];
        const double hp = u[i + 1] - u[i];
        const double A = params.diffusion(u[i]);
        const double B = params.drift(u[i]);

        const double d2m = 2.0 / (hm * (hm + hp));
        const double d2p = 2.0 / (hp * (hm + hp));
        double d1m = -hp / (hm * (hm + hp));
        double d1p = hm / (hp * (hm + hp));

        if (scheme == Scheme::upwind_auto) {
            // Cell Peclet criterion on the side the drift points to.
            if (B > 0.0 && B * hp > 2.0 * A) {
                d1m = 0.0;
                d1p = 1.0 / hp;
                s.upwinded[i] = 1;
            } else if (B < 0.0 && -B * hm > 2.0 * A) {
                d1m = -1.0 / hm;
                d1p = 0.0;
                s.upwinded[i] = 1;
            }
        }
        s.sub[i] = A * d2m + B * d1m;
        s.super[i] = A * d2p + B * d1p;
        s.diag[i] = -(s.sub[i] + s.super[i]) - params.lambda();
    }
    return s;
}

DiscreteOperator assemble(const ModelParams& params, const JumpDistribution& dist, const Grid& grid,
                          Scheme scheme)
{
    DiscreteOperator op(params, grid, scheme);
    const auto u = grid.nodes();
    const std::size_t last = grid.cells();
    const double lambda = params.lambda();
    op.local_ = make_local_stencil(params, grid, scheme);

    for (std::size_t i = 1; i < last; ++i) {
        // Stieltjes weights of the piecewise-linear interpolant over the
        // shifted cells (y_k, y_{k+1}], y_k = u_{i+k} - u_i.
        auto& w = op.nonlocal_[i];
        const std::size_t span = last - i;
        w.assign(span + 1, 0.0);
        double y_lo = 0.0, f_lo = 0.0, g_lo = 0.0;
        for (std::size_t k = 0; k < span; ++k) {
            const double y_hi = u[i + k + 1] - u[i];
            const double f_hi = dist.cdf(y_hi);
            const double g_hi = dist.cdf_integral(y_hi);
            const double mass = f_hi - f_lo;
            if (mass > 0.0) {
                const double avg = (g_hi - g_lo) / (y_hi - y_lo);
                const double upper = std::clamp(f_hi - avg, 0.0, mass);
                w[k] += lambda * (mass - upper);
                w[k + 1] += lambda * upper;
            }
            y_lo = y_hi;
            f_lo = f_hi;
            g_lo = g_hi;
        }
        op.tail_[i] = lambda * dist.survival(u[last] - u[i]);
    }
    return op;
}

GridFunction apply(const DiscreteOperator& op, const GridFunction& phi)
{
    const Grid& grid = op.grid();
    if (phi.values.size() != grid.size())
        throw ModelError("apply: grid function has " + std::to_string(phi.values.size()) +
                         " values, grid has " + std::to_string(grid.size()) + " nodes");
    GridFunction out;
    out.values.assign(grid.size(), 0.0);
    out.far_field = 0.0;
    const auto& v = phi.values;
    for (std::size_t i = op.interior_begin(); i < op.interior_end(); ++i) {
        // Extended accumulator: the local stencil entries can be large and
        // nearly cancel.
        long double acc = static_cast<long double>(op.sub(i)) * v[i - 1] +
                          static_cast<long double>(op.diag(i)) * v[i] +
                          static_cast<long double>(op.super(i)) * v[i + 1];
        const auto w = op.nonlocal(i);
        for (std::size_t k = 0; k < w.size(); ++k) acc += static_cast<long double>(w[k]) * v[i + k];
        acc += static_cast<long double>(op.tail(i)) * phi.far_field;
        out.values[i] = static_cast<double>(acc);
    }
    return out;
}

double sup_norm_interior(const DiscreteOperator& op, const GridFunction& residual)
{
    double m = 0.0;
    for (std::size_t i = op.interior_begin(); i < op.interior_end(); ++i)
        m = std::max(m, std::abs(residual.values[i]));
    return m;
}

double reference_apply(const ModelParams& params, const JumpDistribution& dist, const TestFunction& phi,
                       double u, std::span<const double> breakpoints)
{
    if (!(u > 0.0)) throw ModelError("reference_apply: u must be > 0");
    constexpr double tolerance = 1e-10;

    std::vector<double> cuts;
    for (double b : breakpoints)
        if (b > u) cuts.push_back(b - u);
    for (const auto& [v, p] : dist.atoms()) cuts.push_back(v);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // int_0^inf [phi(u+y) - phi(u)] dF(y) = int_0^inf phi'(u+y) (1 - F(y)) dy
    auto integrand = [&](double y) { return phi.first(u + y) * dist.survival(y); };

    using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
    double total = 0.0, total_error = 0.0;
    double lo = 0.0;
    auto piece = [&](double a, double b) {
        double err = 0.0, l1 = 0.0;
        const double coarse = Quad::integrate(integrand, a, b, 0, 1e-14, &err, &l1);
        if (l1 == 0.0) {
            total += coarse;
            return;
        }
        total += Quad::integrate(integrand, a, b, 20, 1e-12, &err);
        total_error += err;
    };
    for (double cut : cuts) {
        if (cut > lo) piece(lo, cut);
        lo = std::max(lo, cut);
    }
    piece(lo, std::numeric_limits<double>::infinity());

    if (!(total_error <= tolerance) || !std::isfinite(total))
        throw NumericalError("reference_apply: quadrature did not converge at u = " + std::to_string(u) +
                             " (error estimate " + std::to_string(total_error) + ")");

    return params.diffusion(u) * phi.second(u) + params.drift(u) * phi.first(u) + params.lambda() * total;
}

SignAudit audit_signs(const DiscreteOperator& op)
{
    SignAudit audit;
    audit.worst_margin = std::numeric_limits<double>::infinity();
    const double lambda = op.params().lambda();
    for (std::size_t i = op.interior_begin(); i < op.interior_end(); ++i) {
        const auto w = op.nonlocal(i);
        const double diag = op.diag(i) + w[0];
        double off_sum = op.sub(i) + op.super(i);
        double off_min = std::min(op.sub(i), op.super(i));
        double mass = op.tail(i);
        for (std::size_t k = 0; k < w.size(); ++k) {
            mass += w[k];
            off_min = std::min(off_min, w[k]);
            if (k > 0) off_sum += w[k];
        }
        const double scale = std::abs(diag) + off_sum + op.tail(i);
        // Exact in real arithmetic: -diag = off_sum + tail.
        const double margin = (-diag - off_sum - op.tail(i)) / scale;
        const double mass_err = std::abs(mass - lambda);
        audit.worst_margin = std::min(audit.worst_margin, margin);
        audit.worst_offdiag = std::min(audit.worst_offdiag, off_min);
        audit.worst_mass_error = std::max(audit.worst_mass_error, mass_err);
        const bool row_ok = off_min >= 0.0 && margin >= -1e-13 && mass_err <= 1e-10;
        if (!row_ok && audit.ok) {
            audit.ok = false;
            audit.first_bad_row = i;
        }
    }
    return audit;
}

void write_operator_csv(const DiscreteOperator& op, std::ostream& os)
{
    os << "row,col,value,tail\n";
    os.precision(17);
    for (std::size_t i = op.interior_begin(); i < op.interior_end(); ++i) {
        const auto w = op.nonlocal(i);
        const double t = op.tail(i);
        os << i << ',' << i - 1 << ',' << op.sub(i) << ',' << t << '\n';
        os << i << ',' << i << ',' << op.diag(i) + w[0] << ',' << t << '\n';
        os << i << ',' << i + 1 << ',' << op.super(i) + (w.size() > 1 ? w[1] : 0.0) << ',' << t << '\n';
        for (std::size_t k = 2; k < w.size(); ++k)
            if (w[k] != 0.0) os << i << ',' << i + k << ',' << w[k] << ',' << t << '\n';
    }
}

} // namespace survival
