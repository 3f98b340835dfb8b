#include <benchmark/benchmark.h>

#include "ym/master_field.hpp"

using namespace ym;

static void BM_ExpmSkew(benchmark::State& state)
{
    Rng rng(1);
    GroupSpec spec(static_cast<int>(state.range(0)));
    Mat X = random_algebra(spec, 0.5, rng);
    for (auto _ : state) benchmark::DoNotOptimize(expm_skew(X));
}
BENCHMARK(BM_ExpmSkew)->Arg(2)->Arg(8)->Arg(32)->Arg(128);

static void BM_HeatSample(benchmark::State& state)
{
    Rng rng(2);
    GroupSpec spec(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(heat_sample(spec, 1.0, 0, rng));
}
BENCHMARK(BM_HeatSample)->Arg(1)->Arg(2)->Arg(4)->Arg(16);

static void BM_WilsonEstimate(benchmark::State& state)
{
    auto ex = standard_example("lasso_example");
    SamplerOptions opt;
    opt.samples = 1000;
    for (auto _ : state)
        benchmark::DoNotOptimize(wilson_estimate(ex.map, ex.areas, {ex.loops[0]}, GroupSpec(2), opt));
}
BENCHMARK(BM_WilsonEstimate)->Unit(benchmark::kMillisecond);

static void BM_MasterValue(benchmark::State& state)
{
    auto ex = standard_example(state.range(0) == 0 ? "fig2_example" : "lasso_example");
    for (auto _ : state) benchmark::DoNotOptimize(master_value(ex.map, ex.loops[0], ex.areas));
}
BENCHMARK(BM_MasterValue)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
