#include <benchmark/benchmark.h>

#include <cmath>

#include "rspde/grid_noise.hpp"
#include "rspde/heat.hpp"
#include "rspde/solver.hpp"

namespace {

using namespace rspde;

void BM_NoiseIncrements(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto grid = make_grid(n, 1e-3, 1.0);
    Field dw(n);
    std::uint64_t step = 0;
    for (auto _ : state) {
        fill_increments(NoisePlan{1, 0}, grid, step, dw.span());
        step = (step + 1) % grid.n_steps;
        benchmark::DoNotOptimize(dw.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_NoiseIncrements)->Arg(63)->Arg(255)->Arg(1023);

void BM_ThomasSweep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ImplicitHeatStep heat(n, 1e-3, 1.0 / double(n + 1));
    Field u = eigenfunction(1, n);
    for (auto _ : state) {
        heat.apply(u.span(), u.span());
        benchmark::DoNotOptimize(u.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_ThomasSweep)->Arg(63)->Arg(255)->Arg(1023);

void BM_Step(benchmark::State& state, Mode mode) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto model = standard_model();
    const auto grid = make_grid(n, 1e-4, 1e3);
    PathIntegrator path(Field(n, 0.1), mode, model, grid, NoisePlan{3, 0});
    for (auto _ : state) {
        path.advance();
        benchmark::DoNotOptimize(path.state().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK_CAPTURE(BM_Step, reflected, Mode{Reflected{}})->Arg(63)->Arg(255);
BENCHMARK_CAPTURE(BM_Step, penalized, Mode{Penalized{1e-3}})->Arg(63)->Arg(255);

}  // namespace

BENCHMARK_MAIN();
