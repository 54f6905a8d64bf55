#include <benchmark/benchmark.h>

#include <random>

#include "cloaksim/cloak_map.hpp"
#include "cloaksim/helmholtz.hpp"
#include "cloaksim/lattice.hpp"
#include "cloaksim/ray_tracer.hpp"
#include "cloaksim/special_functions.hpp"

using namespace cloaksim;

namespace {

void BM_Hankel(benchmark::State& state) {
  double x = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::hankel1_0(x));
    x = x < 40.0 ? x + 0.37 : 0.05;
  }
}
BENCHMARK(BM_Hankel);

void BM_Material(benchmark::State& state) {
  const CloakSpec s;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec2> pts;
  while (pts.size() < 1024) {
    const Vec2 x(u(rng), u(rng));
    if (std::max(std::abs(x[0]), std::abs(x[1])) >= 0.5) pts.push_back(x);
  }
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(material(s, pts[k++ % pts.size()]));
}
BENCHMARK(BM_Material);

void BM_TraceExact(benchmark::State& state) {
  const CloakSpec s;
  const Vec2 src(-3.0, 0.0);
  const Vec2 N = (Vec2(0.0, 0.3) - src).normalized();
  for (auto _ : state) benchmark::DoNotOptimize(trace_exact(s, src, N, 8.0));
}
BENCHMARK(BM_TraceExact);

void BM_TraceOde(benchmark::State& state) {
  const CloakSpec s;
  const Vec2 src(-3.0, 0.0);
  const Vec2 N = (Vec2(0.0, 0.3) - src).normalized();
  for (auto _ : state) benchmark::DoNotOptimize(trace_ode(s, src, N, 8.0, 1e-9));
}
BENCHMARK(BM_TraceOde)->Unit(benchmark::kMillisecond);

Scenario cloaked_scenario() {
  Scenario sc;
  sc.cloak_enabled = true;
  sc.omega = 5.0;
  sc.source = PointSource{Vec2(-1.5, 0.0)};
  return sc;
}

Grid bench_grid(double h) { return Grid::covering({-1.8, 1.8, -1.8, 1.8}, h, PmlSpec{}, 1.0); }

void BM_Assemble(benchmark::State& state) {
  const Scenario sc = cloaked_scenario();
  const Grid g = bench_grid(0.5 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(sc, g));
  state.counters["unknowns"] = static_cast<double>(g.size());
}
BENCHMARK(BM_Assemble)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  const Scenario sc = cloaked_scenario();
  const Grid g = bench_grid(0.5 / static_cast<double>(state.range(0)));
  const LinearSystem sys = assemble(sc, g);
  for (auto _ : state) benchmark::DoNotOptimize(solve(sys));
  state.counters["unknowns"] = static_cast<double>(g.size());
}
BENCHMARK(BM_Solve)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_BuildRefinedLattice(benchmark::State& state) {
  CloakSpec s;
  s.w = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(build_refined(s, 0.01));
}
BENCHMARK(BM_BuildRefinedLattice)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
