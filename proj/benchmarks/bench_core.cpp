#include <random>

#include <benchmark/benchmark.h>

#include "nlspec/mollifier_suite.hpp"
#include "nlspec/model.hpp"
#include "nlspec/scenario.hpp"

namespace {

using namespace nlspec;

SpectralField random_field(const TorusGrid& grid) {
  std::mt19937_64 rng(42);
  SpectralField f = random_band_limited(grid, 0.1 * grid.n() * grid.n(), rng);
  return f;
}

void BM_ForwardInverse(benchmark::State& state) {
  const TorusGrid grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const GridField g = inverse_transform(random_field(grid));
  for (auto _ : state) benchmark::DoNotOptimize(inverse_transform(forward_transform(g)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_ForwardInverse)->Args({1, 256})->Args({1, 4096})->Args({2, 64})->Args({2, 256});

Problem make_problem(int dim, int n) {
  Scenario sc;
  sc.dim = dim;
  sc.n = n;
  sc.delta = 0.05;
  sc.u_plus = 0.8;
  sc.u_minus = 0.4;
  sc.rho_tilde = 1.0;
  sc.kappa = ModesSpec{0.5, {{{1, 0}, 0.3, 0.0}}};
  sc.eta = ConstantSpec{0.2};
  sc.omega = ConstantSpec{0.3};
  sc.gamma = ConstantSpec{0.4};
  sc.rho0 = GaussianBumpSpec{{0.5, 0.5}, 0.1, 0.5, 1.0};
  sc.kernel = SeparableKernelSpec{ConstantSpec{1.0}, GaussianBumpSpec{{0.3, 0.3}, 0.2, 1.0, 0.1}};
  return render_problem(sc);
}

void BM_RhsRegularized(benchmark::State& state) {
  const Problem p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(rhs_regularized(p.rho0, 0.05, p.data));
}
BENCHMARK(BM_RhsRegularized)->Args({1, 256})->Args({2, 64})->Args({2, 128});

void BM_RhsExpanded(benchmark::State& state) {
  const Problem p = make_problem(1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rhs_classical(p.rho0, p.data, {RhsPath::expanded}));
}
BENCHMARK(BM_RhsExpanded)->Arg(256)->Arg(1024);

void BM_SobolevNorm(benchmark::State& state) {
  const TorusGrid grid(2, static_cast<int>(state.range(0)));
  const SpectralField f = random_field(grid);
  for (auto _ : state) benchmark::DoNotOptimize(sobolev_norm(f, 6));
}
BENCHMARK(BM_SobolevNorm)->Arg(64)->Arg(256);

}  // namespace
BENCHMARK_MAIN();
