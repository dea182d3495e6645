#include <benchmark/benchmark.h>

#include <netrisk/netrisk.hpp>

using namespace netrisk;

static void BM_CalibrateZ(benchmark::State& state) {
    const auto sheet = synthesize(static_cast<std::size_t>(state.range(0)), 2.5, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(calibrate_z(sheet, 0.1, 1.0, true));
    }
}
BENCHMARK(BM_CalibrateZ)->Arg(100)->Arg(400);

static void BM_Sample(benchmark::State& state) {
    const auto sheet = synthesize(static_cast<std::size_t>(state.range(0)), 2.5, 1);
    const auto resolved = resolve(sheet, TopologySpec::with_density(0.1));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample(sheet, resolved, seed++));
    }
}
BENCHMARK(BM_Sample)->Arg(100)->Arg(400);

static void BM_Run(benchmark::State& state) {
    const auto sheet = synthesize(static_cast<std::size_t>(state.range(0)), 2.5, 1);
    const auto net = sample(sheet, TopologySpec::with_density(0.1), 0);
    const auto lambda = leverage_matrix(net, sheet);
    const auto e = sheet.equities();
    const auto shock = make_shock(ShockProtocol::uniform(0.4), sheet);
    DynamicsParams params;
    params.alpha = static_cast<double>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run(lambda, e, shock, params));
    }
}
BENCHMARK(BM_Run)->Args({100, 0})->Args({100, 4})->Args({400, 0});

static void BM_DensitySweep(benchmark::State& state) {
    const auto sheet = synthesize(100, 2.5, 1);
    SweepPlan plan;
    plan.theta = {0.4};
    plan.replicates = 2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep_density_shock(sheet, plan));
    }
}
BENCHMARK(BM_DensitySweep)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
