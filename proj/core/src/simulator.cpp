#include "survival/simulator.hpp"

#include "survival/errors.hpp"
#include "survival/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace survival {

void SimConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ModelError("sim: dt must be > 0");
    if (n_paths < 1) throw ModelError("sim: n_paths must be >= 1");
    if (!(t_max > 0.0)) throw ModelError("sim: t_max must be > 0");
    if (!(barrier > 0.0)) throw ModelError("sim: barrier must be > 0");
}

namespace {

enum class StepEnd { ruined, barrier, segment_done };

// Advances the jump-free dynamics from time t to seg_end.
class ContinuousStepper {
public:
    ContinuousStepper(double a, double sigma, double c, const SimConfig& cfg)
        : drift_log_(a - 0.5 * sigma * sigma), sigma_(sigma), c_(c), dt_(cfg.dt),
          floor_(cfg.dt / 1024.0), near_(10.0 * c * cfg.dt), bridge_(cfg.bridge_correction)
    {
    }

    StepEnd advance(double& x, double& t, double seg_end, double barrier, Rng& rng) const
    {
        std::normal_distribution<double> normal(0.0, 1.0);
        while (t < seg_end) {
            double step = dt_;
            if (c_ > 0.0 && x < near_) step = std::max(x / (10.0 * c_), floor_);
            const bool last = step >= seg_end - t;
            if (last) step = seg_end - t;

            const double x0 = x;
            const double z = normal(rng);
            x = x * std::exp(drift_log_ * step + sigma_ * std::sqrt(step) * z);
            x -= c_ * step;
            t = last ? seg_end : t + step;

            if (x <= 0.0) return StepEnd::ruined;
            if (bridge_ && c_ > 0.0) {
                // Crossing probability of a Brownian bridge with the volatility
                // frozen at the start of the step.
                const double s = sigma_ * x0;
                const double p = std::exp(-2.0 * x0 * x / (s * s * step));
                if (std::generate_canonical<double, 53>(rng) < p) return StepEnd::ruined;
            }
            if (x >= barrier) return StepEnd::barrier;
        }
        return StepEnd::segment_done;
    }

private:
    double drift_log_, sigma_, c_, dt_, floor_, near_;
    bool bridge_;
};

} // namespace

PathOutcome simulate_path(const ModelParams& params, const JumpDistribution& dist, double u, const SimConfig& cfg,
                          Rng& rng)
{
    using Kind = PathOutcome::Kind;
    if (!(u > 0.0)) throw ModelError("simulate_path: initial capital must be > 0");
    if (u >= cfg.barrier) return {Kind::reached_barrier, 0.0, u};

    Rng jumps(rng());
    Rng diffusion(rng());
    std::exponential_distribution<double> interarrival(params.lambda());
    const ContinuousStepper stepper(params.a(), params.sigma(), params.c(), cfg);

    double x = u;
    double t = 0.0;
    double next_jump = interarrival(jumps);
    for (;;) {
        const double seg_end = std::min(next_jump, cfg.t_max);
        switch (stepper.advance(x, t, seg_end, cfg.barrier, diffusion)) {
        case StepEnd::ruined: return {Kind::ruined, t, 0.0};
        case StepEnd::barrier: return {Kind::reached_barrier, t, x};
        case StepEnd::segment_done: break;
        }
        if (seg_end >= cfg.t_max) return {Kind::alive_at_horizon, cfg.t_max, x};
        x += dist.sample(jumps);
        next_jump += interarrival(jumps);
        if (x >= cfg.barrier) return {Kind::reached_barrier, t, x};
    }
}

std::vector<PathOutcome> simulate_paths(const ModelParams& params, const JumpDistribution& dist, double u,
                                        const SimConfig& cfg)
{
    cfg.validate();
    std::vector<PathOutcome> out(static_cast<std::size_t>(cfg.n_paths));
    parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
        Rng rng = make_stream(cfg.seed, i);
        out[i] = simulate_path(params, dist, u, cfg, rng);
    });
    return out;
}

SurvivalEstimate summarize(const std::vector<PathOutcome>& outcomes)
{
    SurvivalEstimate e;
    e.n_paths = static_cast<std::int64_t>(outcomes.size());
    if (e.n_paths == 0) return e;
    std::int64_t absorbed = 0, alive = 0;
    for (const auto& o : outcomes) {
        if (o.kind == PathOutcome::Kind::reached_barrier) ++absorbed;
        else if (o.kind == PathOutcome::Kind::alive_at_horizon) ++alive;
    }
    const double n = static_cast<double>(e.n_paths);
    e.indeterminate = alive;
    e.lower = static_cast<double>(absorbed) / n;
    e.upper = static_cast<double>(absorbed + alive) / n;
    const double mid = e.midpoint();
    e.std_error = std::sqrt(mid * (1.0 - mid) / n);
    return e;
}

SurvivalEstimate estimate_survival(const ModelParams& params, const JumpDistribution& dist, double u,
                                   const SimConfig& cfg)
{
    return summarize(simulate_paths(params, dist, u, cfg));
}

double informed_barrier(const Solution& solution, double slack)
{
    const auto u = solution.grid.nodes();
    for (std::size_t i = 0; i < u.size(); ++i)
        if (solution.phi.values[i] >= 1.0 - slack) return std::max(u[i], u[1]);
    return solution.grid.u_max();
}

DppResult dpp_gap(const Solution& solution, const ModelParams& params, const JumpDistribution& dist, double u,
                  double t, std::int64_t n_paths, const SimConfig& cfg)
{
    if (!(t >= 0.0)) throw ModelError("dpp_gap: t must be >= 0");
    DppResult r;
    r.phi_u = solution.at(u);
    std::vector<double> values(static_cast<std::size_t>(n_paths), r.phi_u);
    if (t > 0.0) {
        SimConfig horizon = cfg;
        horizon.t_max = t;
        horizon.barrier = std::numeric_limits<double>::infinity();
        horizon.n_paths = n_paths;
        const auto outcomes = simulate_paths(params, dist, u, horizon);
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            if (outcomes[i].kind == PathOutcome::Kind::ruined) {
                values[i] = 0.0;
                ++r.ruined;
            } else {
                values[i] = solution.at(outcomes[i].value);
            }
        }
    }
    // Welford in path order; identical inputs give an exact mean.
    double mean = 0.0, m2 = 0.0;
    std::int64_t k = 0;
    for (double v : values) {
        ++k;
        const double d = v - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (v - mean);
    }
    r.mean = mean;
    r.std_error = k > 1 ? std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k)) : 0.0;
    r.gap = std::abs(r.phi_u - r.mean);
    return r;
}

HittingTime hitting_time_jumpfree(const DiffusionParams& params, double u, const SimConfig& cfg, Rng& rng)
{
    if (!(u > 0.0)) return {0.0, false};
    const ContinuousStepper stepper(params.a, params.sigma, params.c, cfg);
    Rng diffusion(rng());
    double x = u;
    double t = 0.0;
    const auto end = stepper.advance(x, t, cfg.t_max, std::numeric_limits<double>::infinity(), diffusion);
    if (end == StepEnd::ruined) return {t, false};
    return {cfg.t_max, true};
}

Lemma1Bound lemma1_upper_bound(const DiffusionParams& params, double lambda, double u, std::int64_t n_paths,
                               const SimConfig& cfg)
{
    if (!(lambda >= 0.0)) throw ModelError("lemma1_upper_bound: lambda must be >= 0");
    if (n_paths < 1) throw ModelError("lemma1_upper_bound: n_paths must be >= 1");
    const auto n = static_cast<std::size_t>(n_paths);
    std::vector<HittingTime> times(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        Rng rng = make_stream(cfg.seed, i);
        times[i] = hitting_time_jumpfree(params, u, cfg, rng);
    });

    Lemma1Bound b;
    b.n_paths = n_paths;
    double mean = 0.0, m2 = 0.0;
    std::int64_t k = 0;
    for (const auto& h : times) {
        if (h.capped) ++b.capped;
        const double v = -std::expm1(-lambda * h.time);
        ++k;
        const double d = v - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (v - mean);
    }
    b.bound = mean;
    b.std_error = k > 1 ? std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k)) : 0.0;
    return b;
}

Lemma1Bound lemma1_upper_bound(const ModelParams& params, double u, std::int64_t n_paths, const SimConfig& cfg)
{
    return lemma1_upper_bound(DiffusionParams::of(params), params.lambda(), u, n_paths, cfg);
}

void write_paths_csv(const std::vector<PathOutcome>& outcomes, std::ostream& os)
{
    os << "path_id,outcome,time_or_value\n";
    os.precision(17);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        switch (o.kind) {
        case PathOutcome::Kind::ruined: os << i << ",ruined," << o.time << '\n'; break;
        case PathOutcome::Kind::reached_barrier: os << i << ",reached_barrier," << o.time << '\n'; break;
        case PathOutcome::Kind::alive_at_horizon: os << i << ",alive," << o.value << '\n'; break;
        }
    }
}

} // namespace survival
