#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <similab/galerkin.hpp>
#include <similab/hermite.hpp>
#include <similab/mixing.hpp>
#include <similab/pde_sim.hpp>
#include <similab/rng.hpp>

using namespace similab;

static void BM_Philox(benchmark::State& state) {
  const NoiseStream ns(1, 0);
  std::uint64_t n = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ns.normal(0, n++));
}
BENCHMARK(BM_Philox);

static void BM_CubicTensor(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(CubicTensor(BasisSpec(k)));
}
BENCHMARK(BM_CubicTensor)->Arg(2)->Arg(8);

static void BM_ModalStep(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const CubicTensor t{BasisSpec(k)};
  const NoiseSpectrum sp(std::vector<double>(static_cast<std::size_t>(k) + 1, 0.1));
  const NoiseStream ns(2, 0);
  std::vector<double> u(static_cast<std::size_t>(k) + 1, 0.0);
  u[0] = 0.3;
  std::size_t step = 0;
  for (auto _ : state) {
    advance_modal(u, sp, &t, true, 0.01, ns, step, 1);
    ++step;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ModalStep)->Arg(2)->Arg(8);

static void BM_GridStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  GridConfig cfg{12.0, n, 0.0, Scheme::Similarity};
  cfg.dt = 0.4 * cfg.spacing() * cfg.spacing();
  GridSolver s(cfg);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = s.grid().at(i);
    u[i] = std::exp(-x * x / 4.0);
  }
  auto st = s.make_state(u, 0.0);
  const NoiseSpectrum none;
  for (auto _ : state) s.step_burgers_similarity(st, none, {});
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GridStep)->Arg(241)->Arg(961);

static void BM_PipeStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  PipePair p;
  p.x = periodic_grid(160.0, n);
  p.u1.resize(n);
  p.u2.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) p.u1[i] = std::exp(-0.5 * p.x.at(i) * p.x.at(i));
  PipeSpectrum s(p);
  double sign = 1.0;
  for (auto _ : state) {
    s.step(0.01, 0.05 * sign);
    sign = -sign;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PipeStep)->Arg(1024)->Arg(4096);
BENCHMARK_MAIN();
