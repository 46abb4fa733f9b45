#include <benchmark/benchmark.h>

#include <numbers>

#include "ceapsk/channel.hpp"
#include "ceapsk/constellation.hpp"
#include "ceapsk/optimizer.hpp"
#include "ceapsk/precoder.hpp"
#include "ceapsk/rng.hpp"
#include "ceapsk/sim.hpp"

using namespace ceapsk;

static void BM_SolveP21(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state)
        for (int n2 = 1; n2 <= n / 2; ++n2) benchmark::DoNotOptimize(solve_p21(n, n2));
}
BENCHMARK(BM_SolveP21)->Arg(16)->Arg(64);

static void BM_SolveP2(benchmark::State& state) {
    const P2Solver solver(static_cast<int>(state.range(0)));
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solver.solve(x));
        x = x < 0.999 ? x + 0.001 : 0.0;
    }
}
BENCHMARK(BM_SolveP2)->Arg(16)->Arg(64);

static void BM_BuildRegionTable(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_region_table(n, 1e-4));
}
BENCHMARK(BM_BuildRegionTable)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_MapPointToPhases(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    StreamRng rng(1, 0, Substream::General);
    const auto h = sample_rayleigh(m, 1.0, rng);
    const Annulus a = compute_annulus(h, 1.0);
    const cdouble target = std::polar(0.5 * (a.inner + a.outer), 0.7);
    for (auto _ : state) benchmark::DoNotOptimize(map_point_to_phases(h, 1.0, target));
}
BENCHMARK(BM_MapPointToPhases)->Arg(2)->Arg(4)->Arg(8)->Arg(64);

static void BM_NearestPoint(benchmark::State& state) {
    const PointSet pts = build_region_table(16, 1e-3).lookup(0.3).constellation_at(0.3).points();
    StreamRng rng(2, 0, Substream::Noise);
    for (auto _ : state) benchmark::DoNotOptimize(nearest_point(pts.points, rng.complex_normal(0.5)));
}
BENCHMARK(BM_NearestPoint);

static void BM_SerChunk(benchmark::State& state) {
    const RegionTable table = build_region_table(16, 1e-4);
    SimConfig cfg;
    cfg.trials = 2048;
    cfg.snr_grid = {db_to_linear(10.0), db_to_linear(20.0), db_to_linear(30.0)};
    for (auto _ : state) benchmark::DoNotOptimize(run_fixed_rate_ser(cfg, &table));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.trials));
}
BENCHMARK(BM_SerChunk)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
