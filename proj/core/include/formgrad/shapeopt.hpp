// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "formgrad/assemble.hpp"
#include "formgrad/solve.hpp"

namespace formgrad {

struct TaylorSample {
  double s = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  bool valid = true;  // false when the moved mesh had an inverted cell
};

/// Taylor remainder report: delta1(s) = |J(X+sV) - J(X) - s dJ[V]| and
/// delta2(s) = |J(X+sV) - J(X) - s dJ[V] - s^2/2 d2J[V,V]| over
/// s = 2^-1 ... 2^-10, with log-log slopes fitted by least squares over
/// the asymptotic range: the smallest 6 valid steps whose remainder
/// exceeds the 1e-13 floor.
struct TaylorReport {
  std::vector<TaylorSample> samples;
  double slope1 = 0.0;
  double slope2 = 0.0;
  double j0 = 0.0;
  double dj = 0.0;   // dJ[V]
  double d2j = 0.0;  // d2J[V,V] (0 when second order disabled)
};

struct TaylorOptions {
  bool second_order = true;
  int num_steps = 10;  // s = 2^-1 ... 2^-num_steps
  /// Called after each mesh move and before evaluating J, e.g. to re-solve
  /// a PDE constraint on the moved mesh. With a re-solve the first-order
  /// remainder keeps its O(s^2) rate; the frozen-coefficient second-order
  /// rate does not apply.
  std::function<void()> resolve;
};

TaylorReport taylor_test(const Form& J, Mesh& mesh, const Function& V,
                         const TaylorOptions& options = {});

/// Vector P1 field with every dof uniform in [-1,1] from the seeded
/// generator; interior and boundary nodes are both perturbed.
Function random_vector_field(const std::shared_ptr<Mesh>& mesh,
                             std::uint64_t seed);

struct RieszResult {
  Function direction;
  double gradient_norm = 0.0;  // sqrt(-dJ[V]), the H1-seminorm of V
};

/// Riesz representative of -dJ in the Laplacian inner product (Laplace
/// smoothing): solves grad V : grad W = -dJ[W] for all W with V = 0 on the
/// fixed markers. At least one fixed marker is required.
RieszResult riesz_representative(const std::vector<double>& dj,
                                 const std::shared_ptr<Mesh>& mesh,
                                 const std::vector<int>& fixed_markers,
                                 const LinearOptions& options = {});

struct OptimizeConfig {
  std::shared_ptr<Mesh> mesh;
  Form residual;   // arity 1 in u
  Form objective;  // arity 0, may depend on u
  Function u;
  Function p;
  std::vector<DirichletBC> state_bcs;
  std::vector<int> fixed_markers;
  double step_size = 0.01;
  int iterations = 100;
  double alpha = 10.0;  // weight of the quadratic volume penalty
};

struct OptRecord {
  int iteration = 0;
  double objective = 0.0;  // penalized: J + alpha (vol - vol0)^2
  double gradient_norm = 0.0;
  double volume = 0.0;
  double step = 0.0;
  int rejections = 0;  // steps rejected for inverted cells this iteration
};

struct OptHistory {
  std::vector<OptRecord> records;
  double initial_volume = 0.0;
};

/// Fixed-step descent on the volume-penalized objective: per iteration,
/// solve state and adjoint, assemble dL + 2 alpha (vol - vol0) dVol, smooth
/// into a descent direction, and move the mesh. A trial step that inverts a
/// cell is rejected and the step size halved (logged in the record); the
/// run aborts when the step underflows 1e-8. Record 0 holds the initial
/// state; one record is appended per iteration.
OptHistory optimize(
    OptimizeConfig& config,
    const std::function<void(const OptRecord&, const Mesh&, const Function&)>&
        on_record = {});

}  // namespace formgrad
