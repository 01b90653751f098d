#include <survival/simulator.hpp>
#include <survival/solver.hpp>

#include <benchmark/benchmark.h>

using namespace survival;

namespace {

const ModelParams params{0.15, 0.3, 1.0, 2.0};
const JumpDistribution jumps = make_exponential(1.0);

void BM_AssembleAndSolve(benchmark::State& state)
{
    GridSpec spec;
    spec.n = static_cast<int>(state.range(0));
    const Grid grid = spec.build(params);
    for (auto _ : state) {
        const auto op = assemble(params, jumps, grid);
        benchmark::DoNotOptimize(solve_direct(op).phi.values.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleAndSolve)->RangeMultiplier(2)->Range(200, 3200)->Complexity()->Unit(benchmark::kMillisecond);

void BM_Picard(benchmark::State& state)
{
    GridSpec spec;
    spec.n = static_cast<int>(state.range(0));
    const auto op = assemble(params, jumps, spec.build(params));
    SolverConfig cfg;
    cfg.method = Method::picard;
    cfg.max_iter = 5000;
    for (auto _ : state) benchmark::DoNotOptimize(solve_picard(op, cfg).phi.values.data());
}
BENCHMARK(BM_Picard)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_AdaptiveSolve(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(solve_adaptive(params, jumps, SolverConfig{}, GridSpec{}).iterations);
}
BENCHMARK(BM_AdaptiveSolve)->Unit(benchmark::kMillisecond);

void BM_SimulatePath(benchmark::State& state)
{
    SimConfig cfg;
    cfg.barrier = 10.0;
    std::uint64_t i = 0;
    for (auto _ : state) {
        Rng rng = make_stream(cfg.seed, i++);
        benchmark::DoNotOptimize(simulate_path(params, jumps, 2.0, cfg, rng).time);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimulatePath)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
