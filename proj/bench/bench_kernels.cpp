// Serial reference vs OpenMP kernels on the same inputs.

#include <benchmark/benchmark.h>

#include "s1deform/kernels.hpp"

using namespace s1d;

namespace {

const MapGerm& germ() {
    static const MapGerm f = parse_germ("u; v^2 + u^2 + u*s; u^2 + v^3 + u^2*v + v*s");
    return f;
}

const DeformationModel& model() {
    static const DeformationModel m = make_model(germ(), 8);
    return m;
}

std::vector<double> grid_values(int n) {
    GeometricGrid g;
    g.n = n;
    return g.values();
}

std::vector<Point> disc_points(int n) {
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) pts.push_back({-0.5 + i / double(n), -0.5 + j / double(n), -0.01});
    }
    return pts;
}

void BM_TraceSerial(benchmark::State& st) {
    const LocusExpansion le = locus_expansion(model());
    const auto v = grid_values(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(trace_rows_serial(model(), le, v));
}

void BM_TraceParallel(benchmark::State& st) {
    const LocusExpansion le = locus_expansion(model());
    const auto v = grid_values(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(trace_rows_parallel(model(), le, v));
}

void BM_CurvatureSerial(benchmark::State& st) {
    const auto pts = disc_points(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(curvature_K_serial(model().poly, pts));
}

void BM_CurvatureParallel(benchmark::State& st) {
    const auto pts = disc_points(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(curvature_K_parallel(model().poly, pts));
}

void BM_MeshSerial(benchmark::State& st) {
    MeshGrid g;
    g.nu = g.nv = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(mesh_serial(germ(), -0.1, g));
}

void BM_MeshParallel(benchmark::State& st) {
    MeshGrid g;
    g.nu = g.nv = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(mesh_parallel(germ(), -0.1, g));
}

}  // namespace

BENCHMARK(BM_TraceSerial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TraceParallel)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurvatureSerial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurvatureParallel)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeshSerial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeshParallel)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
