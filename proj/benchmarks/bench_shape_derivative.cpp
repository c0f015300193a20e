// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "formgrad/cases.hpp"
#include "formgrad/shapeopt.hpp"
#include "formgrad/solve.hpp"
#include "formgrad/space.hpp"

using namespace formgrad;

namespace {

void BM_SymbolicPipeline(benchmark::State& state) {
  // Pullback plus first-order coordinate differentiation, symbolic only.
  auto mesh = unit_square_mesh(4);
  auto ex2 = make_example2(mesh);
  for (auto _ : state) {
    auto rf = shape_derivative(ex2.J, 1);
    benchmark::DoNotOptimize(rf.terms.data());
  }
}
BENCHMARK(BM_SymbolicPipeline);

void BM_ShapeGradientVector(benchmark::State& state) {
  // Symbolic pipeline plus assembly of the derivative vector.
  auto mesh = unit_square_mesh(static_cast<int>(state.range(0)));
  auto ex2 = make_example2(mesh);
  const auto rf = shape_derivative(ex2.J, 1);
  for (auto _ : state) {
    auto dj = assemble(rf);
    benchmark::DoNotOptimize(dj.vector.data());
  }
  state.SetItemsProcessed(state.iterations() * mesh->num_cells());
}
BENCHMARK(BM_ShapeGradientVector)->Arg(8)->Arg(16)->Arg(32);

void BM_ShapeHessianMatrix(benchmark::State& state) {
  auto mesh = unit_square_mesh(static_cast<int>(state.range(0)));
  auto ex1 = make_example1(mesh);
  const auto rf = shape_derivative(ex1.J, 2);
  for (auto _ : state) {
    auto h = assemble(rf);
    benchmark::DoNotOptimize(h.matrix.values().data());
  }
}
BENCHMARK(BM_ShapeHessianMatrix)->Arg(8)->Arg(16);

void BM_RieszSmoothing(benchmark::State& state) {
  auto mesh = unit_square_mesh(static_cast<int>(state.range(0)));
  const auto dvol = assemble(shape_derivative(volume_form(mesh), 1));
  for (auto _ : state) {
    auto r = riesz_representative(dvol.vector, mesh, {1, 2});
    benchmark::DoNotOptimize(r.gradient_norm);
  }
}
BENCHMARK(BM_RieszSmoothing)->Arg(8)->Arg(16);

void BM_NewtonStateSolve(benchmark::State& state) {
  auto ex3 = make_example3(unit_square_mesh(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    for (auto& d : ex3.u.dofs()) d = 0.0;
    ex3.solve_state();
    benchmark::DoNotOptimize(ex3.u.dofs().data());
  }
}
BENCHMARK(BM_NewtonStateSolve)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
