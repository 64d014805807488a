#include <benchmark/benchmark.h>

#include <vector>

#include "scadda/density.hpp"
#include "scadda/geo.hpp"
#include "scadda/rng.hpp"
#include "scadda/warp.hpp"

namespace {

std::vector<double> make_series(scadda::Rng& rng, std::size_t len) {
    std::vector<double> s(len);
    for (double& v : s) v = rng.uniform(-1, 1);
    return s;
}

std::vector<scadda::GeoPoint> make_points(std::size_t n) {
    scadda::Rng rng(4242);
    std::vector<scadda::GeoPoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        pts.push_back({rng.uniform(-10, 10), rng.uniform(-10, 10)});
    return pts;
}

void BM_DtwUnconstrained(benchmark::State& state) {
    scadda::Rng rng(1);
    const auto x = make_series(rng, static_cast<std::size_t>(state.range(0)));
    const auto y = make_series(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(scadda::dtw_distance(x, y));
}
BENCHMARK(BM_DtwUnconstrained)->Arg(64)->Arg(256)->Arg(1024);

void BM_DtwBanded(benchmark::State& state) {
    scadda::Rng rng(1);
    const auto x = make_series(rng, static_cast<std::size_t>(state.range(0)));
    const auto y = make_series(rng, static_cast<std::size_t>(state.range(0)));
    const auto w = scadda::WarpWindow::fraction(0.1);
    for (auto _ : state)
        benchmark::DoNotOptimize(scadda::dtw_distance(x, y, w));
}
BENCHMARK(BM_DtwBanded)->Arg(64)->Arg(256)->Arg(1024);

void BM_KdeFit(benchmark::State& state) {
    const auto pts = make_points(static_cast<std::size_t>(state.range(0)));
    const double beta = scadda::scott_bandwidth(pts.size(), 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(scadda::DensityModel::fit(pts, beta));
}
BENCHMARK(BM_KdeFit)->Arg(200)->Arg(800);

void BM_SpatialMatrix(benchmark::State& state) {
    const auto pts = make_points(400);
    const auto algo = state.range(0) == 0 ? scadda::Algorithm::stdbscan
                                          : scadda::Algorithm::scadda;
    const int workers = static_cast<int>(state.range(1));
    for (auto _ : state)
        benchmark::DoNotOptimize(scadda::spatial_distance_matrix(
            pts, 5.0, scadda::Metric::orthodromic, {}, algo,
            scadda::RescaleForm::mean_of_weights, workers));
}
BENCHMARK(BM_SpatialMatrix)
    ->Args({0, 1})
    ->Args({1, 1})
    ->Args({1, 4})
    ->ArgNames({"scadda", "workers"});

void BM_TemporalMatrix(benchmark::State& state) {
    scadda::Rng rng(2);
    std::vector<std::vector<double>> series;
    for (int i = 0; i < 150; ++i) series.push_back(make_series(rng, 60));
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(scadda::temporal_distance_matrix(
            series, scadda::default_warp_window(), false, false, workers));
}
BENCHMARK(BM_TemporalMatrix)->Arg(1)->Arg(4);

} // namespace

BENCHMARK_MAIN();
