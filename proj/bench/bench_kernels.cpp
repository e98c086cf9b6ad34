// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "nlscat/kernels.hpp"

namespace {

using namespace nlscat;

const WaveContext kCtx{4.0, 2};

void BM_Potential(benchmark::State& state, bool parallel) {
    auto grid = DiskGrid::build(1.0, static_cast<int>(state.range(0)), 2);
    CMatrix out;
    for (auto _ : state) {
        parallel ? kernels::assemble_potential_omp(*grid, kCtx, out)
                 : kernels::assemble_potential_serial(*grid, kCtx, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.counters["nodes"] = static_cast<double>(grid->size());
}

void BM_Matvec(benchmark::State& state, bool parallel) {
    auto grid = DiskGrid::build(1.0, static_cast<int>(state.range(0)), 2);
    CVector f = CVector::Ones(static_cast<Eigen::Index>(grid->size()));
    std::vector<Point> targets(grid->nodes().begin(), grid->nodes().begin() + 256);
    CVector out;
    for (auto _ : state) {
        parallel ? kernels::point_potential_omp(*grid, kCtx, f, targets, {}, out)
                 : kernels::point_potential_serial(*grid, kCtx, f, targets, {}, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_FarField(benchmark::State& state, bool parallel) {
    auto grid = DiskGrid::build(1.0, static_cast<int>(state.range(0)), 2);
    auto obs = DirectionSet::build(64, 2);
    CMatrix out;
    for (auto _ : state) {
        parallel ? kernels::assemble_far_field_omp(*grid, *obs, kCtx.k, out)
                 : kernels::assemble_far_field_serial(*grid, *obs, kCtx.k, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_Herglotz(benchmark::State& state, bool parallel) {
    auto grid = DiskGrid::build(1.0, static_cast<int>(state.range(0)), 2);
    auto dirs = DirectionSet::build(64, 2);
    CMatrix out;
    for (auto _ : state) {
        parallel ? kernels::assemble_herglotz_omp(*dirs, kCtx.k, grid->nodes(), out)
                 : kernels::assemble_herglotz_serial(*dirs, kCtx.k, grid->nodes(), out);
        benchmark::DoNotOptimize(out.data());
    }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Potential, serial, false)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Potential, omp, true)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Matvec, serial, false)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Matvec, omp, true)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FarField, serial, false)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FarField, omp, true)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Herglotz, serial, false)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Herglotz, omp, true)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
