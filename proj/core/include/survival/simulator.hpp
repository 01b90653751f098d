#pragma once

#include "survival/jumps.hpp"
#include "survival/model.hpp"
#include "survival/random.hpp"
#include "survival/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

namespace survival {

struct SimConfig {
    double dt = 1e-3;
    std::int64_t n_paths = 100000;
    double t_max = 200.0;
    double barrier = std::numeric_limits<double>::infinity();  // upper absorption level
    std::uint64_t seed = 20240611;
    bool bridge_correction = false;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct PathOutcome {
    enum class Kind { ruined, reached_barrier, alive_at_horizon };
    Kind kind = Kind::alive_at_horizon;
    double time = 0.0;   // ruin or absorption time; t_max when alive
    double value = 0.0;  // terminal capital (0 when ruined, barrier crossing level when absorbed)
};

struct SurvivalEstimate {
    double lower = 0.0;  // fraction absorbed at the barrier
    double upper = 0.0;  // fraction not ruined by the horizon
    double std_error = 0.0;  // binomial standard error of the midpoint
    std::int64_t n_paths = 0;
    std::int64_t indeterminate = 0;  // alive at the horizon

    double midpoint() const { return 0.5 * (lower + upper); }
};

// One trajectory of dX = (aX - c)dt + sigma X dW + dP from X_0 = u.
// Jump epochs are exact Exp(lambda) interarrivals. Between jumps the
// continuous part uses Lie splitting: an exact geometric step followed by
// the payout X -= c*dt, with the step shrunk near 0. Ruin is declared at the
// first nonpositive value. The generator is split into independent jump and
// diffusion streams so that runs with different coefficients share jumps.
PathOutcome simulate_path(const ModelParams& params, const JumpDistribution& dist, double u,
                          const SimConfig& cfg, Rng& rng);

// Outcomes of paths 0..n_paths-1; path i uses make_stream(cfg.seed, i).
std::vector<PathOutcome> simulate_paths(const ModelParams& params, const JumpDistribution& dist, double u,
                                        const SimConfig& cfg);

SurvivalEstimate summarize(const std::vector<PathOutcome>& outcomes);

SurvivalEstimate estimate_survival(const ModelParams& params, const JumpDistribution& dist, double u,
                                   const SimConfig& cfg);

// Smallest grid node where the solved survival probability reaches
// 1 - slack; U_max when it never does.
double informed_barrier(const Solution& solution, double slack = 1e-3);

struct DppResult {
    double gap = 0.0;      // |phi(u) - mean phi(X_{t ^ tau})|
    double std_error = 0.0;  // standard error of the sample mean
    double phi_u = 0.0;
    double mean = 0.0;
    std::int64_t ruined = 0;
};

// Simulates to the fixed time t (no barrier) and compares phi(u) with the
// sample mean of phi(X_{t ^ tau}), phi = 0 on ruined paths.
DppResult dpp_gap(const Solution& solution, const ModelParams& params, const JumpDistribution& dist, double u,
                  double t, std::int64_t n_paths, const SimConfig& cfg);

struct HittingTime {
    double time = 0.0;
    bool capped = false;  // did not hit 0 before cfg.t_max
};

// First time the jump-free diffusion dY = (aY - c)dt + sigma Y dW started at
// u is <= 0, using the same splitting scheme as simulate_path.
HittingTime hitting_time_jumpfree(const DiffusionParams& params, double u, const SimConfig& cfg, Rng& rng);

struct Lemma1Bound {
    double bound = 0.0;  // mean of 1 - exp(-lambda T)
    double std_error = 0.0;
    std::int64_t capped = 0;
    std::int64_t n_paths = 0;
};

// Monte Carlo estimate of E[1 - exp(-lambda T_u(Y))], an upper bound for the
// survival probability at u (survival needs a jump before Y hits 0).
// Capped samples contribute T = t_max, which biases the bound upwards.
Lemma1Bound lemma1_upper_bound(const DiffusionParams& params, double lambda, double u, std::int64_t n_paths,
                               const SimConfig& cfg);
Lemma1Bound lemma1_upper_bound(const ModelParams& params, double u, std::int64_t n_paths, const SimConfig& cfg);

// path_id,outcome,time_or_value
void write_paths_csv(const std::vector<PathOutcome>& outcomes, std::ostream& os);

} // namespace survival
