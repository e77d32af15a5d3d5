#include "cbnet/isothermic.hpp"
#include "cbnet/samples.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace cbnet;

namespace {

SampleSpec gauss(int n) {
    SampleSpec s;
    s.kind = SampleKind::enneper_gauss;
    s.eps = 1.0 / (n - 1);
    s.rows = s.cols = n;
    s.k0 = s.l0 = -0.5 * (n - 1);
    s.xi = 0.3;
    s.eta = 0.2;
    return s;
}

QuadNet moebius_grid(int n) {
    QuadNet grid = generate({.kind = SampleKind::square_grid, .eps = 1.0 / n, .rows = n, .cols = n});
    const MoebiusTransform t = MoebiusTransform::sphere_inversion({0.3, 0.2, 0.8}, 0.7) *
                               MoebiusTransform::rotation(Eigen::AngleAxisd(0.4, Vec3(1, 2, 3).normalized()).matrix());
    return apply_moebius(t, build_congruence(grid, 0.1 / (n * n))).net;
}

void BM_Classify(benchmark::State& state) {
    const Checkerboard cbp = build_checkerboard(moebius_grid(static_cast<int>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(classify(cbp));
    }
    state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_Classify)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_CurvatureTable(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const QuadNet net = generate({.kind = SampleKind::sphere_graticule, .eps = 1.0 / n, .rows = n, .cols = n,
                                  .k0 = -0.5 * n, .l0 = -0.5 * n});
    for (auto _ : state) {
        benchmark::DoNotOptimize(curvature_table(net, vertex_normals(net)));
    }
    state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_CurvatureTable)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_IsKoenigs(benchmark::State& state) {
    const Checkerboard cbp = build_checkerboard(moebius_grid(static_cast<int>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(is_koenigs(cbp));
    }
    state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_IsKoenigs)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_Dualize(benchmark::State& state) {
    const Checkerboard cbp = build_checkerboard(moebius_grid(static_cast<int>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dualize(cbp));
    }
    state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_Dualize)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_MinimalFromGauss(benchmark::State& state) {
    const QuadNet g = generate(gauss(static_cast<int>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(minimal_from_gauss(g));
    }
    state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_MinimalFromGauss)->RangeMultiplier(2)->Range(8, 32)->Complexity();

}  // namespace

BENCHMARK_MAIN();
