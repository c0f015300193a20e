// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "formgrad/assemble.hpp"
#include "formgrad/cases.hpp"
#include "formgrad/space.hpp"

using namespace formgrad;

namespace {

void BM_MassMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int degree = static_cast<int>(state.range(1));
  auto mesh = unit_square_mesh(n);
  auto space = FunctionSpace::create(mesh, degree, 1);
  const Form mass = dx(argument(0, space) * argument(1, space), mesh);
  const auto rf = pull_back(mass);
  for (auto _ : state) {
    auto M = assemble(rf);
    benchmark::DoNotOptimize(M.matrix.values().data());
  }
  state.SetItemsProcessed(state.iterations() * mesh->num_cells());
}
BENCHMARK(BM_MassMatrix)->Args({8, 1})->Args({16, 1})->Args({32, 1})->Args({16, 2});

void BM_StiffnessAction(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto mesh = unit_square_mesh(n);
  auto space = FunctionSpace::create(mesh, 1, 1);
  const Form a =
      dx(inner(grad(argument(0, space)), grad(argument(1, space))), mesh);
  const auto A = assemble(a);
  std::vector<double> x(static_cast<std::size_t>(space->dim()), 1.0);
  for (auto _ : state) {
    auto y = A.matrix.multiply(x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_StiffnessAction)->Arg(16)->Arg(32)->Arg(64);

void BM_FunctionalAssembly(benchmark::State& state) {
  auto mesh = unit_square_mesh(static_cast<int>(state.range(0)));
  auto ex2 = make_example2(mesh);
  const auto rf = pull_back(ex2.J);
  for (auto _ : state) {
    auto j = assemble(rf);
    benchmark::DoNotOptimize(j.scalar);
  }
  state.SetItemsProcessed(state.iterations() * mesh->num_cells());
}
BENCHMARK(BM_FunctionalAssembly)->Arg(16)->Arg(32)->Arg(64);

}  // namespace
