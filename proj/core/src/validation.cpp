#include "survival/validation.hpp"

#include "survival/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace survival {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v)
{
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

CheckEntry make_entry(std::string name, double measured, std::string relation, double tolerance, bool passed,
                      std::string detail = {})
{
    CheckEntry e;
    e.name = std::move(name);
    e.measured = measured;
    e.relation = std::move(relation);
    e.tolerance = tolerance;
    e.passed = passed;
    e.detail = std::move(detail);
    return e;
}

CheckEntry at_most(std::string name, double measured, double tolerance, std::string detail = {})
{
    const bool ok = std::isfinite(measured) && measured <= tolerance;
    return make_entry(std::move(name), measured, "<=", tolerance, ok, std::move(detail));
}

CheckEntry at_least(std::string name, double measured, double tolerance, std::string detail = {})
{
    const bool ok = std::isfinite(measured) && measured >= tolerance;
    return make_entry(std::move(name), measured, ">=", tolerance, ok, std::move(detail));
}

// Runs `body`, which returns entries, and stamps the elapsed time on each.
template <class Body>
void timed(ValidationReport& report, Body&& body)
{
    const auto start = Clock::now();
    std::vector<CheckEntry> entries = body();
    const double elapsed = seconds_since(start);
    for (auto& e : entries) {
        e.runtime_seconds = elapsed;
        report.add(std::move(e));
    }
}

Grid every_other_node(const Grid& fine)
{
    const auto u = fine.nodes();
    std::vector<double> nodes;
    for (std::size_t i = 0; i < u.size(); i += 2) nodes.push_back(u[i]);
    if (nodes.back() != u.back()) nodes.push_back(u.back());
    return Grid(std::move(nodes));
}

} // namespace

bool ValidationReport::passed() const
{
    if (checks.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const CheckEntry& c) { return c.passed; });
}

void ValidationReport::append(const std::vector<CheckEntry>& entries)
{
    checks.insert(checks.end(), entries.begin(), entries.end());
}

std::string report_to_json(const ValidationReport& report)
{
    nlohmann::ordered_json j;
    j["passed"] = report.passed();
    auto checks = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["status"] = c.passed ? "pass" : "fail";
        e["measured"] = c.measured;
        e["relation"] = c.relation;
        e["tolerance"] = c.tolerance;
        e["runtime_seconds"] = c.runtime_seconds;
        e["detail"] = c.detail;
        checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

void print_table(const ValidationReport& report, std::ostream& os)
{
    std::size_t width = 5;
    for (const auto& c : report.checks) width = std::max(width, c.name.size());
    os << std::left << std::setw(static_cast<int>(width)) << "check" << "  status  measured          tolerance\n";
    for (const auto& c : report.checks) {
        os << std::left << std::setw(static_cast<int>(width)) << c.name << "  " << (c.passed ? "pass  " : "FAIL  ")
           << "  " << std::setw(16) << num(c.measured) << "  " << c.relation << ' ' << num(c.tolerance);
        if (!c.detail.empty()) os << "   " << c.detail;
        os << '\n';
    }
    for (const auto& w : report.warnings) os << "warning: " << w << '\n';
    os << (report.passed() ? "ALL CHECKS PASSED\n" : "SOME CHECKS FAILED\n");
}

ConvergenceResult convergence_study(const ModelParams& params, const JumpDistribution& dist, const TestFunction& fn,
                                    const std::vector<Grid>& grids, double probe_lo, double probe_hi,
                                    Scheme scheme)
{
    if (grids.size() < 3) throw ModelError("convergence study: need at least 3 grids in the refinement family");

    ConvergenceResult result;
    std::map<double, double> reference;
    bool exact = true;
    for (const Grid& grid : grids) {
        const auto op = assemble(params, dist, grid, scheme);
        GridFunction phi;
        for (double u : grid.nodes()) phi.values.push_back(fn.value(u));
        phi.far_field = fn.value(grid.u_max());
        const auto residual = apply(op, phi);

        double err = 0.0, h = 0.0, scale = 1.0;
        bool any = false;
        for (std::size_t i = op.interior_begin(); i < op.interior_end(); ++i) {
            const double u = grid[i];
            if (u < probe_lo || u > probe_hi) continue;
            any = true;
            auto it = reference.find(u);
            if (it == reference.end()) it = reference.emplace(u, reference_apply(params, dist, fn, u)).first;
            err = std::max(err, std::abs(residual.values[i] - it->second));
            scale = std::max(scale, std::abs(op.diag(i)));
            h = std::max({h, grid.spacing(i - 1), grid.spacing(i)});
        }
        if (!any) throw ModelError("convergence study: no grid node inside the probe window");
        if (!result.h.empty() && !(h < result.h.back()))
            throw ModelError("convergence study: grid spacing does not decrease along the family");
        result.h.push_back(h);
        result.error.push_back(err);
        exact = exact && err <= 1e-13 * scale;
    }

    result.exact = exact;
    if (result.exact) return result;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (std::size_t k = 0; k < result.h.size(); ++k) {
        if (!(result.error[k] > 0.0)) continue;
        const double x = std::log(result.h[k]);
        const double y = std::log(result.error[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count >= 2) result.order = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return result;
}

ComparisonResult discrete_comparison_check(const DiscreteOperator& op, int n_trials, Rng& rng)
{
    ComparisonResult result;
    const LinearSolver solver(op);
    const std::size_t n_nodes = op.grid().size();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    result.min_strict_gap = std::numeric_limits<double>::infinity();

    for (int t = 0; t < n_trials; ++t) {
        double b0[2] = {unit(rng), unit(rng)};
        double bf[2] = {unit(rng), unit(rng)};
        std::sort(b0, b0 + 2);
        std::sort(bf, bf + 2);
        // Nonnegative forcing: dense, sparse or constant depending on the trial.
        std::vector<double> forcing(n_nodes, 0.0);
        const double level = std::pow(10.0, -3.0 * unit(rng));
        for (std::size_t i = 1; i + 1 < n_nodes; ++i) {
            switch (t % 3) {
            case 0: forcing[i] = level * unit(rng); break;
            case 1: forcing[i] = unit(rng) < 0.05 ? level * unit(rng) : 0.0; break;
            default: forcing[i] = level; break;
            }
        }
        std::vector<double> rhs_v(n_nodes);
        for (std::size_t i = 0; i < n_nodes; ++i) rhs_v[i] = -forcing[i];

        const GridFunction lo = solver.solve({}, b0[0], bf[0]);
        const GridFunction hi = solver.solve(rhs_v, b0[1], bf[1]);
        double worst = -std::numeric_limits<double>::infinity();
        double gap = 0.0;
        std::size_t where = 0;
        for (std::size_t i = 0; i < n_nodes; ++i) {
            const double d = lo.values[i] - hi.values[i];
            if (d > worst) {
                worst = d;
                where = i;
            }
            gap = std::max(gap, -d);
        }
        ++result.trials;
        result.min_strict_gap = std::min(result.min_strict_gap, gap);
        if (worst > result.worst_violation || t == 0) {
            result.worst_violation = std::max(result.worst_violation, worst);
            if (worst > 1e-10) {
                result.passed = false;
                result.offending_node = where;
            }
        }
    }
    return result;
}

UniquenessResult uniqueness_check(const DiscreteOperator& op, int k_starts, const SolverConfig& cfg,
                                  std::uint64_t seed)
{
    if (k_starts < 1) throw ModelError("uniqueness check: need at least one start");
    const std::size_t n_nodes = op.grid().size();
    Rng rng = make_stream(seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<GridFunction> finals;
    UniquenessResult result;
    for (int s = 0; s < k_starts; ++s) {
        std::vector<double> init(n_nodes);
        for (auto& v : init) v = s == 0 ? 0.0 : s == 1 ? 1.0 : unit(rng);
        Solution sol = solve_picard(op, cfg, std::move(init));
        result.iterations.push_back(sol.iterations);
        finals.push_back(std::move(sol.phi));
    }
    for (std::size_t i = 0; i < finals.size(); ++i)
        for (std::size_t j = i + 1; j < finals.size(); ++j)
            for (std::size_t k = 0; k < n_nodes; ++k)
                result.max_distance =
                    std::max(result.max_distance, std::abs(finals[i].values[k] - finals[j].values[k]));
    return result;
}

UniquenessResult uniqueness_check(const ModelParams& params, const JumpDistribution& dist, const Grid& grid,
                                  int k_starts, const SolverConfig& cfg, std::uint64_t seed)
{
    return uniqueness_check(assemble(params, dist, grid, cfg.scheme), k_starts, cfg, seed);
}

std::vector<CheckEntry> boundary_check(const Solution& solution, const ModelParams& params,
                                       const JumpDistribution& dist, const BoundaryBudget& budget)
{
    (void)dist;
    std::vector<CheckEntry> out;
    const auto& v = solution.phi.values;
    const std::size_t n = v.size();

    out.push_back(make_entry("boundary_phi_at_zero", std::abs(v.front()), "==", 0.0, v.front() == 0.0,
                             "Dirichlet datum at u = 0"));
    out.push_back(at_least("boundary_phi_at_u_max", v[n - 1], budget.far_min,
                           "U_max = " + num(solution.grid.u_max())));
    out.push_back(at_least("boundary_phi_last_interior", v[n - 2], budget.far_min,
                           "u = " + num(solution.grid[n - 2])));

    const double u1 = solution.grid[1];
    const auto bound = lemma1_upper_bound(params, u1, budget.lemma1_samples, budget.sim);
    const double threshold = bound.bound + 3.0 * (bound.std_error + budget.allowance);
    out.push_back(at_most("boundary_lemma1_first_node", v[1], threshold,
                          "u = " + num(u1) + ", bound = " + num(bound.bound) + ", se = " + num(bound.std_error) +
                              ", capped = " + std::to_string(bound.capped)));
    return out;
}

std::vector<CheckEntry> cross_validate(const Solution& solution, const ModelParams& params,
                                       const JumpDistribution& dist, const std::vector<double>& u_list,
                                       const SimConfig& sim, double allowance)
{
    std::vector<CheckEntry> out;
    for (double u : u_list) {
        const auto start = Clock::now();
        const auto est = estimate_survival(params, dist, u, sim);
        const double phi = solution.at(u);
        const double outside = std::max({0.0, est.lower - phi, phi - est.upper});
        const double tol = 3.0 * est.std_error + allowance;
        auto e = at_most("cross_validate_u=" + num(u), outside, tol,
                         "phi = " + num(phi) + ", mc = [" + num(est.lower) + ", " + num(est.upper) +
                             "], se = " + num(est.std_error) + ", indeterminate = " +
                             std::to_string(est.indeterminate) + ", barrier = " + num(sim.barrier));
        e.runtime_seconds = seconds_since(start);
        out.push_back(std::move(e));
    }
    return out;
}

double richardson_estimate(const ModelParams& params, const JumpDistribution& dist, const Grid& fine,
                           const SolverConfig& cfg)
{
    const Grid coarse = every_other_node(fine);
    const auto fine_sol = solve_direct(assemble(params, dist, fine, cfg.scheme));
    const auto coarse_sol = solve_direct(assemble(params, dist, coarse, cfg.scheme));
    double diff = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i)
        diff = std::max(diff, std::abs(coarse_sol.phi.values[i] - fine_sol.at(coarse[i])));
    return diff;
}

std::vector<CheckEntry> solution_checks(const Solution& solution, const DiscreteOperator& op, double tol)
{
    std::vector<CheckEntry> out;
    const auto& v = solution.phi.values;
    double below = 0.0, above = 0.0, drop = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        below = std::max(below, -v[i]);
        above = std::max(above, v[i] - 1.0);
        if (i > 0) drop = std::max(drop, v[i - 1] - v[i]);
    }
    out.push_back(at_most("solution_range", std::max(below, above), 1e-9, "distance outside [0, 1]"));
    out.push_back(at_most("solution_monotone_in_u", drop, 1e-9, "largest decrease between nodes"));
    out.push_back(at_most("solution_residual", sup_norm_interior(op, apply(op, solution.phi)), tol));

    const auto audit = audit_signs(op);
    out.push_back(make_entry("operator_sign_conditions", audit.worst_offdiag, ">=", 0.0,
                             audit.worst_offdiag >= 0.0 && audit.worst_margin >= -1e-13,
                             "dominance margin " + num(audit.worst_margin)));
    out.push_back(at_most("operator_row_mass", audit.worst_mass_error, 1e-10, "|sum w + tail - lambda|"));
    return out;
}

ValidationReport run_validation(const ModelParams& params, const JumpDistribution& dist, const ValidationPlan& plan)
{
    ValidationReport report;
    if (auto w = dist.support_warning(); !w.empty()) report.warnings.push_back(w);
    if (params.payout_free()) report.warnings.push_back("payout-free diagnostic mode (c = 0)");

    const auto solve_start = Clock::now();
    const Solution solution = solve_adaptive(params, dist, plan.solver, plan.grid);
    const DiscreteOperator op = assemble(params, dist, solution.grid, plan.solver.scheme);
    {
        auto entries = solution_checks(solution, op, plan.solver.tol);
        const double elapsed = seconds_since(solve_start);
        for (auto& e : entries) e.runtime_seconds = elapsed;
        report.append(entries);
    }

    if (!plan.consistency_n.empty()) {
        timed(report, [&] {
            std::vector<Grid> grids;
            for (int n : plan.consistency_n) grids.push_back(make_grid(plan.consistency_u_max, n));
            TestFunction fn{[](double u) { return std::exp(-u); }, [](double u) { return -std::exp(-u); },
                            [](double u) { return std::exp(-u); }};
            const auto conv = convergence_study(params, dist, fn, grids, plan.consistency_probe_lo,
                                                plan.consistency_probe_hi, plan.solver.scheme);
            std::ostringstream detail;
            detail << "errors";
            for (double e : conv.error) detail << ' ' << num(e);
            const double order = conv.exact ? std::numeric_limits<double>::infinity() : conv.order.value_or(0.0);
            auto e = make_entry("operator_consistency_order", order, ">=", plan.consistency_min_order,
                                conv.exact || order >= plan.consistency_min_order, detail.str());
            return std::vector<CheckEntry>{e};
        });
    }

    timed(report, [&] {
        const double est = richardson_estimate(params, dist, plan.grid.build(params), plan.solver);
        return std::vector<CheckEntry>{at_most("discretization_allowance_covers_richardson", est, plan.allowance,
                                               "two-level estimate on the base grid")};
    });

    BoundaryBudget budget;
    budget.lemma1_samples = plan.lemma1_samples;
    budget.sim = plan.sim;
    budget.allowance = plan.allowance;
    timed(report, [&] { return boundary_check(solution, params, dist, budget); });

    timed(report, [&] {
        Rng rng = make_stream(plan.sim.seed, 0xC0FFEE);
        const auto cmp = discrete_comparison_check(op, plan.comparison_trials, rng);
        return std::vector<CheckEntry>{make_entry(
            "comparison_principle", cmp.worst_violation, "<=", 1e-10, cmp.passed,
            std::to_string(cmp.trials) + " trials, offending node " + std::to_string(cmp.offending_node))};
    });

    const Grid base = plan.grid.build(params);
    const DiscreteOperator base_op = assemble(params, dist, base, plan.solver.scheme);
    timed(report, [&] {
        const auto uq = uniqueness_check(base_op, plan.uniqueness_starts, plan.solver, plan.sim.seed);
        std::string its;
        for (int k : uq.iterations) its += (its.empty() ? "" : ",") + std::to_string(k);
        return std::vector<CheckEntry>{at_most("picard_uniqueness", uq.max_distance, 10.0 * plan.solver.tol,
                                               "iterations " + its)};
    });
    timed(report, [&] {
        const auto direct = solve_direct(base_op);
        const auto picard = solve_picard(base_op, plan.solver);
        double d = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i)
            d = std::max(d, std::abs(direct.phi.values[i] - picard.phi.values[i]));
        return std::vector<CheckEntry>{at_most("direct_vs_picard", d, 10.0 * plan.solver.tol,
                                               std::to_string(picard.iterations) + " Picard iterations")};
    });

    if (plan.parameter_trends) {
        timed(report, [&] {
            auto phi_at = [&](const ModelParams& p, const JumpDistribution& d) {
                return solve_direct(assemble(p, d, base, plan.solver.scheme));
            };
            auto trend = [&](const std::string& name, const std::vector<Solution>& sols, bool increasing) {
                double worst = 0.0;
                for (std::size_t k = 1; k < sols.size(); ++k)
                    for (std::size_t i = 0; i < base.size(); ++i) {
                        const double step = sols[k].phi.values[i] - sols[k - 1].phi.values[i];
                        worst = std::max(worst, increasing ? -step : step);
                    }
                return at_most(name, worst, 1e-9, "largest violation of the expected ordering");
            };
            std::vector<CheckEntry> out;
            const double c = params.c();
            if (c > 0.0) {
                out.push_back(trend("trend_payout_decreases_phi",
                                    {phi_at(params.with_payout(0.8 * c), dist), phi_at(params, dist),
                                     phi_at(params.with_payout(1.2 * c), dist)},
                                    false));
            }
            const double lam = params.lambda();
            out.push_back(trend("trend_intensity_increases_phi",
                                {phi_at(params.with_intensity(0.5 * lam), dist), phi_at(params, dist),
                                 phi_at(params.with_intensity(2.0 * lam), dist)},
                                true));
            out.push_back(trend("trend_jump_scale_increases_phi",
                                {phi_at(params, dist), phi_at(params, dist.scaled(1.5)),
                                 phi_at(params, dist.scaled(2.0))},
                                true));
            return out;
        });
    }

    SimConfig sim = plan.sim;
    if (plan.informed_barrier) sim.barrier = informed_barrier(solution, plan.barrier_slack);
    report.append(cross_validate(solution, params, dist, plan.u_list, sim, plan.allowance));

    timed(report, [&] {
        const auto dpp = dpp_gap(solution, params, dist, plan.dpp_u, plan.dpp_t, plan.sim.n_paths, plan.sim);
        return std::vector<CheckEntry>{at_most("dpp_identity", dpp.gap, 3.0 * dpp.std_error + plan.allowance,
                                               "phi(u) = " + num(dpp.phi_u) + ", mean = " + num(dpp.mean) +
                                                   ", se = " + num(dpp.std_error))};
    });
    return report;
}

} // namespace survival
