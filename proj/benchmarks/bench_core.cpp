#include <benchmark/benchmark.h>

#include "epkit/cpoly.hpp"
#include "epkit/periods.hpp"
#include "epkit/spectrum.hpp"
#include "epkit/trajectory.hpp"
#include "epkit/weierstrass.hpp"

using namespace epkit;

static void BM_QuinticRoots(benchmark::State& state) {
    ProblemSpec s = ProblemSpec::quintic(0.05, -1.0);
    PolynomialC p = s.e_minus_v();
    for (auto _ : state) benchmark::DoNotOptimize(roots(p));
}
BENCHMARK(BM_QuinticRoots);

static void BM_Discriminant(benchmark::State& state) {
    PolynomialC p = ProblemSpec::quintic(0.03, -1.0).e_minus_v();
    for (auto _ : state) benchmark::DoNotOptimize(discriminant(p));
}
BENCHMARK(BM_Discriminant);

static void BM_CycleIntegral(benchmark::State& state) {
    ProblemSpec s = ProblemSpec::pure_quintic(1.0);
    Cycle low = canonical_cycles(s)[0].second;
    for (auto _ : state) benchmark::DoNotOptimize(cycle_integral(s, low));
}
BENCHMARK(BM_CycleIntegral);

static void BM_WpEvaluation(benchmark::State& state) {
    CubicFlow flow(1.0);
    cplx t(0.9, 0.4);
    for (auto _ : state) benchmark::DoNotOptimize(flow.wp_at(t));
}
BENCHMARK(BM_WpEvaluation);

static void BM_StemTrajectory(benchmark::State& state) {
    ProblemSpec s = ProblemSpec::cubic(0.0, 1.0, 1.0);
    Cycle low = canonical_cycles(s)[0].second;
    for (auto _ : state)
        benchmark::DoNotOptimize(stem_trajectory(s, {low.a, low.b, false}));
}
BENCHMARK(BM_StemTrajectory);

static void BM_ShootMismatch(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(shoot(0.05, cplx(0.7, 0.0), WedgeProblem::One));
}
BENCHMARK(BM_ShootMismatch);

BENCHMARK_MAIN();
