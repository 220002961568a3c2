#include <benchmark/benchmark.h>

#include <numbers>

#include "screenwave/asym_model.hpp"
#include "screenwave/capacity_bem.hpp"
#include "screenwave/dtn_scatter.hpp"
#include "screenwave/helmholtz_fem.hpp"

using namespace screenwave;

namespace {

const double kKappa = 0.8 * std::numbers::pi;

mesh::WaveguideGeometry2D symmetric(double eps) {
  mesh::WaveguideGeometry2D g;
  g.L = 0.69;
  g.Z = 1.7;
  g.left = mesh::Screen::with_holes({mesh::Interval::centered(0.5, eps)});
  g.right = g.left;
  return g;
}

double h_of(const benchmark::State& state) { return 0.2 / double(state.range(0)); }

void BM_LimitScattering(benchmark::State& state) {
  double beta = -5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(asym::limit_scattering(0.7, 1.9, kKappa, 1, beta));
    beta += 1e-6;
  }
}
BENCHMARK(BM_LimitScattering);

void BM_BuildMesh(benchmark::State& state) {
  const auto g = symmetric(0.02);
  std::size_t n = 0;
  for (auto _ : state) n = mesh::build_mesh(g, {h_of(state), 0.5, 4}).triangles.size();
  state.counters["triangles"] = double(n);
}
BENCHMARK(BM_BuildMesh)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const auto m = mesh::build_mesh(symmetric(0.02), {h_of(state), 0.5, 4});
  for (auto _ : state) benchmark::DoNotOptimize(fem::assemble(m, kKappa));
  state.counters["dofs"] = double(m.n_nodes());
}
BENCHMARK(BM_Assemble)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  auto m = std::make_shared<const mesh::Mesh>(mesh::build_mesh(symmetric(0.02), {h_of(state), 0.5, 4}));
  scatter::SolveOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(scatter::solve_on_mesh(m, kKappa, o));
  state.counters["dofs"] = double(m->n_nodes());
}
BENCHMARK(BM_Solve)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_DiskCapacity(benchmark::State& state) {
  const auto panels = bem::panelize(bem::CrackShape::disk(1.0), int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bem::solve_capacity(panels));
}
BENCHMARK(BM_DiskCapacity)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
