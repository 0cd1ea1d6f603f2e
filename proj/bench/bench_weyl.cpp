// OpenMP anti-diagonal assembly against the serial reference, ModelB symbol
// (xi-dependent, so the split path is not taken). Thread count follows
// OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "tunnel/model.hpp"
#include "tunnel/quantize.hpp"

using namespace tunnel;

namespace {

SymbolFn modelb_symbol(const Grid& g) {
    static const Model m = builtin_model("ModelB");
    const double h = g.h;
    return [h](double x, double xi) { return m.a(xi) + h * m.b(x, xi); };
}

void BM_weyl_parallel(benchmark::State& state) {
    const Grid g = make_grid(8, static_cast<int>(state.range(0)), 0.05);
    const auto p = modelb_symbol(g);
    for (auto _ : state) benchmark::DoNotOptimize(weyl_matrix(p, g));
    state.SetComplexityN(state.range(0));
}

void BM_weyl_serial(benchmark::State& state) {
    const Grid g = make_grid(8, static_cast<int>(state.range(0)), 0.05);
    const auto p = modelb_symbol(g);
    for (auto _ : state) benchmark::DoNotOptimize(weyl_matrix_serial(p, g));
    state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_weyl_parallel)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_weyl_serial)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
