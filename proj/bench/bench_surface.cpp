// Serial reference loop against the OpenMP kernel on the synthetic dataset.
#include <benchmark/benchmark.h>

#include "gwpcor/gw_engine.hpp"
#include "gwpcor/synth.hpp"

namespace {

struct Fixture {
    gwpcor::Dataset dataset;
    gwpcor::DataMatrix data;
    gwpcor::AnalysisSpec spec;

    explicit Fixture(std::size_t n)
        : dataset(gwpcor::synth_dataset(n, 3, 42)), data(dataset.variable_names(), dataset.columns)
    {
        spec.var_a = "v1";
        spec.var_b = "v2";
        spec.kernel = gwpcor::KernelKind::Bisquare;
        spec.bandwidth = gwpcor::BandwidthSpec(0.2);
    }
};

void BM_SurfaceSerial(benchmark::State& state)
{
    const Fixture f(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto s = gwpcor::compute_surface_serial(f.data, f.dataset.coords, f.spec);
        benchmark::DoNotOptimize(s.per_location.data());
    }
    state.SetComplexityN(state.range(0));
}

void BM_SurfaceParallel(benchmark::State& state)
{
    const Fixture f(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto s = gwpcor::compute_surface(f.data, f.dataset.coords, f.spec);
        benchmark::DoNotOptimize(s.per_location.data());
    }
    state.SetComplexityN(state.range(0));
}

void BM_SurfacePartial(benchmark::State& state)
{
    Fixture f(static_cast<std::size_t>(state.range(0)));
    f.spec.mode = gwpcor::Mode::PartialCorrelation;
    f.spec.controls = {"v3"};
    for (auto _ : state) {
        auto s = gwpcor::compute_surface(f.data, f.dataset.coords, f.spec);
        benchmark::DoNotOptimize(s.per_location.data());
    }
    state.SetComplexityN(state.range(0));
}

} // namespace

BENCHMARK(BM_SurfaceSerial)->RangeMultiplier(2)->Range(500, 4000)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_SurfaceParallel)->RangeMultiplier(2)->Range(500, 4000)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_SurfacePartial)->RangeMultiplier(2)->Range(500, 4000)->Unit(benchmark::kMillisecond)->Complexity();

BENCHMARK_MAIN();
