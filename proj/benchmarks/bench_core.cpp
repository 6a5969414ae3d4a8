// Microbenchmarks for the hot paths: radical continuation, loop integrals,
// the moment solve and the bordered determinant.

#include <benchmark/benchmark.h>

#include "rhmod/modulation.hpp"

using namespace rhmod;

namespace {
BranchpointSet fixture_alphas() {
    return BranchpointSet(1, {cplx(0, 1), cplx(1, 0.8), cplx(2, 0.6)});
}

ScatteringData cubic() { return ScatteringData::parse_f0("z^3"); }

RhpOptions fopts() {
    RhpOptions o;
    o.geometry.margin = 0.12;
    return o;
}
} // namespace

static void BM_RadicalPoint(benchmark::State& state) {
    ContourSystem cs = build_contours(fixture_alphas(), fopts().geometry);
    Radical R(cs);
    cplx z(0.37, 1.41);
    for (auto _ : state) benchmark::DoNotOptimize(R(z));
}
BENCHMARK(BM_RadicalPoint);

static void BM_LoopMoment(benchmark::State& state) {
    ContourSystem cs = build_contours(fixture_alphas(), fopts().geometry);
    ContourWorkspace ws(cs);
    ws.moment(cs.loops_m[0], 0);   // warm the table cache
    for (auto _ : state) benchmark::DoNotOptimize(ws.moment(cs.loops_m[0], 0));
}
BENCHMARK(BM_LoopMoment);

static void BM_SolveConstants(benchmark::State& state) {
    auto sd = cubic();
    auto bps = fixture_alphas();
    for (auto _ : state) benchmark::DoNotOptimize(solve_constants(bps, sd, 0.3, 0.1, fopts()));
}
BENCHMARK(BM_SolveConstants);

static void BM_EvalK(benchmark::State& state) {
    auto sol = solve_constants(fixture_alphas(), cubic(), 0.3, 0.1, fopts());
    cplx z(0.5, 1.13);
    for (auto _ : state) benchmark::DoNotOptimize(eval_K(sol, z));
}
BENCHMARK(BM_EvalK);

static void BM_ModulationResidual(benchmark::State& state) {
    auto sol = solve_constants(fixture_alphas(), cubic(), 0.3, 0.1, fopts());
    for (auto _ : state) benchmark::DoNotOptimize(modulation_residual(sol));
}
BENCHMARK(BM_ModulationResidual);

BENCHMARK_MAIN();
