// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "formgrad/form.hpp"

namespace formgrad {

/// An integrand rewritten on the reference element. The expression contains
/// only reference quantities: RefValue/RefGrad of coefficients and
/// arguments, constants, and the reference normal. The cell map enters
/// through the coordinate coefficient X: F = RefValue(X), J = RefGrad(X),
/// K = inv(J), and the measure scaling (|det J| for cells, the Nanson
/// factor |det J| * ||K^T n_ref|| for facets) is folded into the expression.
/// Shape derivatives of the integrand are plain Gateaux derivatives with
/// respect to X.
struct ReferenceIntegrand {
  Expr expr;
  Measure measure = Measure::Cell;
  int subdomain = kEverywhere;
  int quad_degree = 1;
  std::shared_ptr<const Mesh> mesh;
};

/// Assembly-ready counterpart of Form.
struct ReferenceForm {
  std::vector<ReferenceIntegrand> terms;
  int arity = 0;
  std::shared_ptr<const Mesh> mesh;
  /// Argument spaces recorded at construction; kept even when every term
  /// containing an argument pruned to zero.
  std::array<std::shared_ptr<const FunctionSpace>, 2> argument_spaces{};

  std::shared_ptr<const FunctionSpace> argument_space(int number) const;
};

/// Pulls one physical-space term back to the reference element: physical
/// gradients are lowered to terminals and mapped through K, the spatial
/// coordinate becomes RefValue(X), the physical facet normal becomes
/// K^T n_ref normalized, and the measure scaling is attached. The
/// quadrature degree is resolved here (estimate or explicit override).
ReferenceIntegrand pull_back(const IntegralTerm& term,
                             std::shared_ptr<const Mesh> mesh);

ReferenceForm pull_back(const Form& form);

/// A differentiation direction for the coordinate field: either an
/// Argument expression or a concrete vector P1 Function, both on the
/// mesh's coordinate space.
using Direction = std::variant<Expr, Function>;

/// Gateaux derivative of the pulled-back integrand with respect to the
/// coordinate coefficient, applied once per direction in order. Through
/// J = RefGrad(X) the standard rules induce dJ[V] = RefGrad(V),
/// dK[V] = -K dJ K, d|det J|[V] = |det J| tr(K dJ) and dF[V] = RefValue(V).
ReferenceIntegrand coordinate_derivative(const ReferenceIntegrand& ri,
                                         std::span<const Direction> dirs);

/// Pulls back every term and differentiates with respect to the mesh
/// coordinates, with fresh Arguments (numbered from the form's arity) as
/// directions. order must be 1 or 2 and arity + order <= 2. The result
/// assembles to the shape-derivative vector (order 1) or matrix (order 2).
ReferenceForm shape_derivative(const Form& form, int order);

/// Same with explicit directions (Functions and/or Arguments).
ReferenceForm shape_derivative(const Form& form,
                               std::span<const Direction> dirs);

}  // namespace formgrad
