#include <benchmark/benchmark.h>

#include "semiconj/conjugacy.hpp"

using namespace semiconj;

static void BM_FlowClosedRadial(benchmark::State& state) {
    const SystemSpec sys = make_builtin("normalized", 2);
    const IntegratorConfig cfg = IntegratorConfig::closed_form_defaults();
    const Vec x = make_vec({3.0, 4.0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(flow(sys, x, 2.5, cfg));
    }
}
BENCHMARK(BM_FlowClosedRadial);

static void BM_FlowNumericRadial(benchmark::State& state) {
    const SystemSpec sys = make_builtin("normalized", 2);
    const IntegratorConfig cfg = IntegratorConfig::numeric_defaults();
    const Vec x = make_vec({3.0, 4.0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(flow(sys, x, 2.5, cfg));
    }
}
BENCHMARK(BM_FlowNumericRadial);

static void BM_FlowNumericPlanar(benchmark::State& state) {
    const SystemSpec sys = make_builtin("x0-plane", 2);
    const IntegratorConfig cfg = IntegratorConfig::numeric_defaults();
    const Vec x = make_vec({1.0, 1.0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(flow(sys, x, 2.0, cfg));
    }
}
BENCHMARK(BM_FlowNumericPlanar);

static void BM_MapForwardNumeric(benchmark::State& state) {
    const ConjugacyMap map = ConjugacyMap::build(make_builtin("x0-plane", 2), 0.25, 1.0);
    const Vec x = make_vec({0.8, -0.4});
    for (auto _ : state) {
        benchmark::DoNotOptimize(map.h(x));
    }
}
BENCHMARK(BM_MapForwardNumeric);

static void BM_MapInverseClosed(benchmark::State& state) {
    const ConjugacyMap map = ConjugacyMap::build(make_builtin("normalized", 3), 0.5, 1.0);
    const Vec y = make_vec({1.2, -0.4, 0.3});
    for (auto _ : state) {
        benchmark::DoNotOptimize(map.h_inverse(y));
    }
}
BENCHMARK(BM_MapInverseClosed);

static void BM_GammaWindow(benchmark::State& state) {
    const ConjugacyMap map = ConjugacyMap::build(make_builtin("normalized", 2), 0.5, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(map.gamma_r(1.0));
    }
}
BENCHMARK(BM_GammaWindow);

BENCHMARK_MAIN();
