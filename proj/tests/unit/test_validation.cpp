#include <doctest.h>

#include "support.hpp"

#include <survival/errors.hpp>
#include <survival/validation.hpp>

#include <json.hpp>

#include <cmath>
#include <sstream>

using namespace survival;
using testing::acceptance_jumps;
using testing::acceptance_params;

namespace {

TestFunction exp_decay()
{
    return {[](double u) { return std::exp(-u); }, [](double u) { return -std::exp(-u); },
            [](double u) { return std::exp(-u); }};
}

std::vector<Grid> uniform_family(double u_max, std::initializer_list<int> ns)
{
    std::vector<Grid> out;
    for (int n : ns) out.push_back(make_grid(u_max, n));
    return out;
}

SimConfig quick_sim(std::int64_t n)
{
    SimConfig s;
    s.n_paths = n;
    s.threads = 1;
    return s;
}

} // namespace

TEST_CASE("consistency order in the central regime")
{
    const auto r = convergence_study(acceptance_params(), acceptance_jumps(), exp_decay(),
                                     uniform_family(10.0, {100, 200, 400}), 1.0, 4.0);
    REQUIRE(r.order.has_value());
    CHECK_FALSE(r.exact);
    CHECK(*r.order >= 1.8);
    CHECK(r.h.size() == 3);
    CHECK(r.h[0] == doctest::Approx(0.1));
}

TEST_CASE("constants are reported as exact")
{
    const TestFunction one{[](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
    const auto r = convergence_study(acceptance_params(), acceptance_jumps(), one,
                                     uniform_family(10.0, {100, 200, 400}), 1.0, 4.0);
    CHECK(r.exact);
    CHECK_FALSE(r.order.has_value());
    for (double e : r.error) CHECK(e <= 1e-10);
}

TEST_CASE("upwind-forced regime is first order")
{
    const ModelParams p(0.15, 0.3, 20.0, 2.0);
    const auto grids = uniform_family(10.0, {20, 40, 80});
    const auto op = assemble(p, acceptance_jumps(), grids[0]);
    bool upwinded = true;
    for (std::size_t i = 2; i <= 8; ++i) upwinded = upwinded && op.upwinded(i);
    CHECK(upwinded);
    const auto r = convergence_study(p, acceptance_jumps(), exp_decay(), grids, 1.0, 4.0);
    REQUIRE(r.order.has_value());
    CHECK(*r.order >= 0.9);
}

TEST_CASE("convergence study needs a refining family of three grids")
{
    const auto p = acceptance_params();
    CHECK_THROWS_AS(convergence_study(p, acceptance_jumps(), exp_decay(), uniform_family(10.0, {100, 200}), 1, 4),
                    ModelError);
    CHECK_THROWS_AS(
        convergence_study(p, acceptance_jumps(), exp_decay(), uniform_family(10.0, {100, 400, 200}), 1, 4),
        ModelError);
}

TEST_CASE("comparison principle")
{
    const auto p = acceptance_params();
    const auto op = assemble(p, acceptance_jumps(), GridSpec{}.build(p));
    const LinearSolver solver(op);
    const std::size_t n = op.grid().size();

    // Same data gives the same solution bit for bit.
    const auto u = solver.solve({}, 0.2, 0.9);
    const auto v = solver.solve({}, 0.2, 0.9);
    CHECK(u.values == v.values);

    // A constant positive source lifts the solution strictly somewhere.
    const std::vector<double> g(n, -1e-3);
    const auto w = solver.solve(g, 0.2, 0.9);
    double gap = 0.0, violation = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        gap = std::max(gap, w.values[i] - u.values[i]);
        violation = std::max(violation, u.values[i] - w.values[i]);
    }
    CHECK(gap > 0.0);
    CHECK(violation <= 1e-10);

    Rng rng = make_stream(2024, 0);
    const auto r = discrete_comparison_check(op, 100, rng);
    CHECK(r.passed);
    CHECK(r.trials == 100);
    CHECK(r.worst_violation <= 1e-10);
    CHECK(r.min_strict_gap > 0.0);
}

TEST_CASE("uniqueness from several Picard starts")
{
    const auto p = acceptance_params();
    SolverConfig cfg;
    cfg.method = Method::picard;
    cfg.max_iter = 5000;
    const Grid g = make_grid(50.0, 400, 50.0, 1.0 / 0.15);
    const auto two = uniqueness_check(p, acceptance_jumps(), g, 2, cfg, 1);
    CHECK(two.max_distance <= 10.0 * cfg.tol);
    CHECK(two.iterations.size() == 2);

    const auto single = uniqueness_check(p, acceptance_jumps(), g, 1, cfg, 1);
    CHECK(single.max_distance == 0.0);

    const auto r1 = uniqueness_check(p, acceptance_jumps(), g, 4, cfg, 77);
    const auto r2 = uniqueness_check(p, acceptance_jumps(), g, 4, cfg, 77);
    CHECK(r1.max_distance == r2.max_distance);
    CHECK(r1.iterations == r2.iterations);
    CHECK(r1.max_distance <= 10.0 * cfg.tol);
}

TEST_CASE("boundary checks on the acceptance instance")
{
    const auto p = acceptance_params();
    const auto sol = solve_adaptive(p, acceptance_jumps(), SolverConfig{}, GridSpec{});
    BoundaryBudget budget;
    budget.sim = quick_sim(1);
    const auto entries = boundary_check(sol, p, acceptance_jumps(), budget);
    REQUIRE(entries.size() == 4);
    for (const auto& e : entries) CHECK_MESSAGE(e.passed, e.name);
    CHECK(sol.phi.values.front() == 0.0);
}

TEST_CASE("cross-validation")
{
    const auto p = acceptance_params();
    const auto d = acceptance_jumps();
    const auto sol = solve_adaptive(p, d, SolverConfig{}, GridSpec{});
    auto sim = quick_sim(3000);
    sim.barrier = informed_barrier(sol);

    // Includes a point below the first interior node.
    const double below = 0.5 * sol.grid[1];
    const auto entries = cross_validate(sol, p, d, {below, 1.0, 2.0}, sim, 0.01);
    REQUIRE(entries.size() == 3);
    for (const auto& e : entries) CHECK_MESSAGE(e.passed, e.name << ": " << e.detail);

    const auto free = p.with_payout(0.0);
    const auto one = solve_adaptive(free, d, SolverConfig{}, GridSpec{});
    auto free_sim = quick_sim(300);
    free_sim.barrier = 10.0;
    for (const auto& e : cross_validate(one, free, d, {0.5, 3.0}, free_sim, 1e-8)) {
        CHECK_MESSAGE(e.passed, e.detail);
        CHECK(e.measured <= 1e-8);
    }
}

TEST_CASE("Richardson estimate is within the discretisation allowance")
{
    const auto p = acceptance_params();
    const double est = richardson_estimate(p, acceptance_jumps(), GridSpec{}.build(p), SolverConfig{});
    CHECK(est > 0.0);
    CHECK(est < 0.01);
}

TEST_CASE("structural checks of a solution")
{
    const auto p = acceptance_params();
    const auto op = assemble(p, acceptance_jumps(), GridSpec{}.build(p));
    const auto sol = solve_direct(op);
    for (const auto& e : solution_checks(sol, op, 1e-10)) CHECK_MESSAGE(e.passed, e.name);

    auto broken = sol;
    broken.phi.values[10] = 1.5;
    const auto entries = solution_checks(broken, op, 1e-10);
    CHECK_FALSE(entries[0].passed);
    CHECK_FALSE(entries[1].passed);
}

TEST_CASE("report serialisation")
{
    ValidationReport empty;
    CHECK_FALSE(empty.passed());

    ValidationReport r;
    r.add({"alpha", true, 0.5, 1.0, "<=", 0.1, "ok"});
    r.warnings.push_back("something odd");
    CHECK(r.passed());
    r.add({"beta", false, 2.0, 1.0, "<=", 0.2, ""});
    CHECK_FALSE(r.passed());

    const auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["passed"] == false);
    REQUIRE(j["checks"].size() == 2);
    CHECK(j["checks"][1]["name"] == "beta");
    CHECK(j["checks"][1]["status"] == "fail");
    CHECK(j["warnings"][0] == "something odd");

    std::ostringstream table;
    print_table(r, table);
    CHECK(table.str().find("beta") != std::string::npos);
    CHECK(table.str().find("FAIL") != std::string::npos);
}

TEST_CASE("full report on a reduced budget")
{
    ValidationPlan plan;
    plan.sim = quick_sim(1500);
    plan.solver.max_iter = 5000;
    plan.comparison_trials = 20;
    plan.lemma1_samples = 2000;
    const auto report = run_validation(acceptance_params(), acceptance_jumps(), plan);
    for (const auto& c : report.checks) CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
    CHECK(report.passed());
    CHECK(report.warnings.empty());

    plan.allowance = 0.0;
    plan.u_list = {2.0};
    const auto broken = run_validation(acceptance_params(), acceptance_jumps(), plan);
    CHECK_FALSE(broken.passed());

    const auto empirical = make_empirical({{0.5, 0.3}, {1.0, 0.4}, {2.5, 0.3}});
    plan.allowance = 0.01;
    const auto emp = run_validation(acceptance_params(), empirical, plan);
    for (const auto& c : emp.checks) CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
    CHECK(emp.warnings.size() == 1);
}
