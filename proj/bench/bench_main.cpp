// Microbenchmarks comparing the OpenMP evaluators against the deliberately
// naive serial references, plus the hot paths of the swap search. Build with
// the `kdsel_bench` target; not part of the test suite.
#include <benchmark/benchmark.h>

#include <vector>

#include "kdsel/discrepancy.hpp"
#include "kdsel/generators.hpp"
#include "kdsel/kernels.hpp"
#include "kdsel/reference.hpp"
#include "kdsel/rng.hpp"
#include "kdsel/subset_select.hpp"

using namespace kdsel;

namespace {

PointSet uniform_points(int n, int d) {
    Rng rng(1234);
    std::vector<double> coords(static_cast<std::size_t>(n) * d);
    for (double& c : coords) c = rng.uniform();
    return PointSet(d, std::move(coords));
}

void BM_l2star_parallel(benchmark::State& state) {
    const PointSet P = uniform_points(static_cast<int>(state.range(0)), 6);
    const StarKernel K(6);
    for (auto _ : state) benchmark::DoNotOptimize(kernel_disc_sq(P, K).value);
}
BENCHMARK(BM_l2star_parallel)->Arg(512)->Arg(2048);

void BM_l2star_serial(benchmark::State& state) {
    const PointSet P = uniform_points(static_cast<int>(state.range(0)), 6);
    const StarKernel K(6);
    for (auto _ : state) benchmark::DoNotOptimize(ref::kernel_disc_sq_serial(P, K));
}
BENCHMARK(BM_l2star_serial)->Arg(512)->Arg(2048);

void BM_warnock_parallel(benchmark::State& state) {
    const PointSet P = uniform_points(static_cast<int>(state.range(0)), 6);
    for (auto _ : state) benchmark::DoNotOptimize(warnock_l2_sq(P).value);
}
BENCHMARK(BM_warnock_parallel)->Arg(512)->Arg(2048);

void BM_warnock_serial(benchmark::State& state) {
    const PointSet P = uniform_points(static_cast<int>(state.range(0)), 6);
    for (auto _ : state) benchmark::DoNotOptimize(ref::warnock_l2_sq_serial(P));
}
BENCHMARK(BM_warnock_serial)->Arg(512)->Arg(2048);

void BM_ksd_parallel(benchmark::State& state) {
    const auto mix = make_default_mixture_score();
    const PointSet P = sample_target(*mix, static_cast<int>(state.range(0)), 5);
    const SteinKernel K(mix, median_bandwidth(P));
    for (auto _ : state) benchmark::DoNotOptimize(ksd_sq(P, K).value);
}
BENCHMARK(BM_ksd_parallel)->Arg(256)->Arg(1024);

void BM_ksd_serial(benchmark::State& state) {
    const auto mix = make_default_mixture_score();
    const PointSet P = sample_target(*mix, static_cast<int>(state.range(0)), 5);
    const SteinKernel K(mix, median_bandwidth(P));
    for (auto _ : state) benchmark::DoNotOptimize(ref::ksd_sq_serial(P, K));
}
BENCHMARK(BM_ksd_serial)->Arg(256)->Arg(1024);

void BM_linf_parallel(benchmark::State& state) {
    const PointSet P = uniform_points(static_cast<int>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(linf_star_exact(P).value);
}
BENCHMARK(BM_linf_parallel)->Arg(64)->Arg(256);

void BM_linf_serial(benchmark::State& state) {
    const PointSet P = uniform_points(static_cast<int>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(ref::linf_star_grid_serial(P));
}
BENCHMARK(BM_linf_serial)->Arg(64)->Arg(256);

void BM_best_swap(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const PointSet P = uniform_points(n, 3);
    const ContributionTable table(P, StarKernel(3), 50, true);
    std::vector<int> init(50);
    for (int i = 0; i < 50; ++i) init[static_cast<std::size_t>(i)] = i;
    const SubsetState base(table, IndexSubset(n, init));
    for (auto _ : state) {
        SubsetState s = base;
        benchmark::DoNotOptimize(s.best_swap());
    }
}
BENCHMARK(BM_best_swap)->Arg(512)->Arg(2048);

void BM_table_build_cached(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const PointSet P = uniform_points(n, 3);
    const StarKernel K(3);
    for (auto _ : state)
        benchmark::DoNotOptimize(ContributionTable(P, K, 50, true).constant());
}
BENCHMARK(BM_table_build_cached)->Arg(512)->Arg(2048);

}  // namespace

BENCHMARK_MAIN();
