#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "muskat/fvref.hpp"
#include "muskat/jko.hpp"
#include "muskat/transport.hpp"

using namespace muskat;

namespace {

GridDensity gaussian_density(const Grid& g, double mean, double sigma) {
    std::vector<double> v(g.n_cells);
    for (std::size_t i = 0; i < g.n_cells; ++i) {
        const double x = g.center(i);
        v[i] = std::exp(-0.5 * (x - mean) * (x - mean) / (sigma * sigma));
    }
    GridDensity u(g, v);
    u.normalize();
    return u;
}

void bm_wasserstein2(benchmark::State& state) {
    const Grid g = Grid::from_bounds(-8.0, 8.0, static_cast<std::size_t>(state.range(0)));
    const GridDensity u = gaussian_density(g, 0.0, 1.0);
    const GridDensity v = gaussian_density(g, 1.0, 0.8);
    for (auto _ : state) benchmark::DoNotOptimize(wasserstein2(u, v));
}
BENCHMARK(bm_wasserstein2)->Arg(1024)->Arg(4096);

void bm_quantiles_from_density(benchmark::State& state) {
    const Grid g = Grid::from_bounds(-8.0, 8.0, 4096);
    const GridDensity u = gaussian_density(g, 0.0, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            quantiles_from_density(u, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(bm_quantiles_from_density)->Arg(256)->Arg(1024);

void bm_objective_gradient(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const Grid g = Grid::from_bounds(-8.0, 8.0, 2048);
    QuantilePair prev;
    prev.f = quantiles_from_density(gaussian_density(g, 0.0, 1.0), n);
    prev.g = quantiles_from_density(gaussian_density(g, 1.0, 1.0), n);
    prev.params = PhysParams(1.0, 1.0);
    JkoParams p;
    p.N = n;
    for (auto _ : state) benchmark::DoNotOptimize(objective_gradient(prev, prev, p));
}
BENCHMARK(bm_objective_gradient)->Arg(256)->Arg(1024);

void bm_jko_step(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const Grid g = Grid::from_bounds(-8.0, 8.0, 2048);
    QuantilePair prev;
    prev.f = quantiles_from_density(gaussian_density(g, 0.0, 1.0), n);
    prev.g = quantiles_from_density(gaussian_density(g, 1.0, 1.0), n);
    prev.params = PhysParams(1.0, 1.0);
    JkoParams p;
    p.N = n;
    p.tau = 0.01;
    for (auto _ : state) benchmark::DoNotOptimize(minimize_step(prev, p));
}
BENCHMARK(bm_jko_step)->Arg(128)->Arg(512);

void bm_fv_step(benchmark::State& state) {
    const Grid g = Grid::from_bounds(-8.0, 8.0, static_cast<std::size_t>(state.range(0)));
    PairState s;
    s.f = gaussian_density(g, 0.0, 1.0);
    s.g = gaussian_density(g, 1.0, 1.0);
    s.params = PhysParams(1.0, 1.0);
    const FvConfig c(g, s.params);
    const double dt = fv_max_dt(s, c);
    for (auto _ : state) benchmark::DoNotOptimize(fv_step(s, dt, c));
}
BENCHMARK(bm_fv_step)->Arg(1024)->Arg(4096);

} // namespace

BENCHMARK_MAIN();
