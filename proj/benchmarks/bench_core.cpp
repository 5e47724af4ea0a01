#include "ellipsoid_lab/construct.hpp"
#include "ellipsoid_lab/experiment.hpp"
#include "ellipsoid_lab/gram.hpp"
#include "ellipsoid_lab/numerics.hpp"
#include "ellipsoid_lab/sampling.hpp"

#include <benchmark/benchmark.h>

using namespace ellipsoid_lab;

static void BM_DrawSampleSet(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto m = static_cast<std::size_t>(state.range(1));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(draw_sample_set(d, m, seed++));
}
BENCHMARK(BM_DrawSampleSet)->Args({50, 300})->Args({200, 1000});

static void BM_BuildM(benchmark::State& state) {
    const SampleSet s = draw_sample_set(static_cast<std::size_t>(state.range(0)),
                                        static_cast<std::size_t>(state.range(1)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(build_M(s));
}
BENCHMARK(BM_BuildM)->Args({50, 300})->Args({200, 1000});

static void BM_SplitA(benchmark::State& state) {
    const SampleSet s = draw_sample_set(static_cast<std::size_t>(state.range(0)),
                                        static_cast<std::size_t>(state.range(1)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(split_A(s));
}
BENCHMARK(BM_SplitA)->Args({200, 1000})->Unit(benchmark::kMillisecond);

static void BM_IdentityFit(benchmark::State& state) {
    const SampleSet s = draw_sample_set(static_cast<std::size_t>(state.range(0)),
                                        static_cast<std::size_t>(state.range(1)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(identity_perturbation_fit(s));
}
BENCHMARK(BM_IdentityFit)->Args({50, 62})->Args({50, 625})->Args({200, 1000})->Unit(benchmark::kMillisecond);

static void BM_LeastNormFit(benchmark::State& state) {
    const SampleSet s = draw_sample_set(static_cast<std::size_t>(state.range(0)),
                                        static_cast<std::size_t>(state.range(1)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(least_norm_fit(s));
}
BENCHMARK(BM_LeastNormFit)->Args({50, 625})->Unit(benchmark::kMillisecond);

// Dense solver against Lanczos on the same matrix.
static void BM_ExtremeEigsDense(benchmark::State& state) {
    const SymMatrix a = build_A(draw_sample_set(100, static_cast<std::size_t>(state.range(0)), 2));
    for (auto _ : state) benchmark::DoNotOptimize(extreme_eigs(a));
}
BENCHMARK(BM_ExtremeEigsDense)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_ExtremeEigsLanczos(benchmark::State& state) {
    const SymMatrix a = build_A(draw_sample_set(100, static_cast<std::size_t>(state.range(0)), 2));
    for (auto _ : state) benchmark::DoNotOptimize(extreme_eigs_lanczos(a));
}
BENCHMARK(BM_ExtremeEigsLanczos)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_RunTrial(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trial(50, static_cast<std::size_t>(state.range(0)), seed++,
                                           FitMethod::identity_perturbation));
    }
}
BENCHMARK(BM_RunTrial)->Arg(312)->Arg(1250)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
