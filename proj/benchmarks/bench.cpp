// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "curlrec/manufactured.hpp"
#include "curlrec/reconstruct.hpp"

namespace {

using namespace curlrec;

void BM_assemble(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  Mesh mesh = uniform_square_mesh(n);
  MaterialModel mat = MaterialModel::constant(mesh, 1.0, 1.0, 1.0);
  Manufactured prob = manufactured_case("trig", 1.0);
  DGConfig cfg;
  cfg.p = p;
  cfg.eta_star = 20.0;
  for (auto _ : state) {
    DGSystem sys = assemble(mesh, mat, cfg, prob.source);
    benchmark::DoNotOptimize(sys.matrix);
  }
  state.SetLabel("cells=" + std::to_string(mesh.num_cells()));
}
BENCHMARK(BM_assemble)->Args({4, 1})->Args({8, 1})->Args({8, 2});

void BM_solve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  Mesh mesh = uniform_square_mesh(n);
  MaterialModel mat = MaterialModel::constant(mesh, 1.0, 1.0, 1.0);
  Manufactured prob = manufactured_case("trig", 1.0);
  DGConfig cfg;
  cfg.p = p;
  cfg.eta_star = 20.0;
  DGSystem sys = assemble(mesh, mat, cfg, prob.source);
  for (auto _ : state) {
    BrokenField E = solve(sys);
    benchmark::DoNotOptimize(E.coeffs());
  }
}
BENCHMARK(BM_solve)->Args({4, 1})->Args({8, 2});

void BM_reconstruct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  Mesh mesh = uniform_square_mesh(n);
  std::mt19937_64 rng(7);
  BrokenField E = random_field(mesh, p, 2, rng);
  for (auto _ : state) {
    ConformingField R = reconstruct(E, p + 2);
    benchmark::DoNotOptimize(R.coeffs());
  }
}
BENCHMARK(BM_reconstruct)->Args({2, 0})->Args({2, 1})->Args({4, 1});

void BM_patch_solve(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  Mesh mesh = uniform_square_mesh(4);
  std::mt19937_64 rng(7);
  BrokenField E = random_field(mesh, q - 2, 2, rng);
  LiftingOperator lifting(mesh, E.degree());
  VertexPatch patch = vertex_patch(mesh, mesh.num_vertices() / 2);
  PatchSpaces ps(mesh, patch, q);
  for (auto _ : state) {
    PatchSolution sol = solve_patch(ps, E, lifting);
    benchmark::DoNotOptimize(sol.E);
  }
}
BENCHMARK(BM_patch_solve)->Arg(2)->Arg(3)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
