// Serial reference kernels against the OpenMP ones.
//
//   pmerge_bench --benchmark_filter=Estimate
//
// Worker counts above the machine's core count only measure overhead.

#include <benchmark/benchmark.h>

#include <vector>

#include "pmerge/analytics.hpp"
#include "pmerge/merge.hpp"
#include "pmerge/montecarlo.hpp"
#include "pmerge/random.hpp"
#include "pmerge/spec_parser.hpp"

using namespace pmerge;

namespace {

const char* const kModels[] = {"indep:n=100", "clayton:n=10,t=1", "t:n=10,rho=0.5,df=4"};

mc::SimulationPlan make_plan(std::int64_t model) {
    mc::SimulationPlan plan{parse_copula_spec(kModels[model]), RMean{-1.0, std::nullopt},
                            {0.001, 0.01, 0.05, 0.1, 0.2, 0.5}};
    plan.reps = 200'000;
    plan.seed = 1;
    return plan;
}

void BM_EstimateSerial(benchmark::State& state) {
    const auto plan = make_plan(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(mc::reference::estimate_rn_serial(plan));
    state.SetLabel(kModels[state.range(0)]);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plan.reps));
}

void BM_EstimateParallel(benchmark::State& state) {
    const auto plan = make_plan(state.range(0));
    const mc::Execution exec{static_cast<int>(state.range(1))};
    for (auto _ : state) benchmark::DoNotOptimize(mc::estimate_rn(plan, exec));
    state.SetLabel(kModels[state.range(0)]);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plan.reps));
}

void BM_KappaGrid(benchmark::State& state) {
    analytics::KappaOptions options;
    options.workers = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(analytics::kappa_constant(options));
}

void BM_HarmonicKernel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const BoundStatistic stat(RMean{-1.0, std::nullopt}, n);
    RandomStream rng(3, 0);
    std::vector<double> u(n);
    for (auto& x : u) x = rng.uniform();
    for (auto _ : state) benchmark::DoNotOptimize(stat.evaluate(u));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_EstimateSerial)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateParallel)
    ->ArgsProduct({{0, 1, 2}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_KappaGrid)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HarmonicKernel)->RangeMultiplier(10)->Range(10, 10000);

BENCHMARK_MAIN();
