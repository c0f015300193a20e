// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "formgrad/expr.hpp"
#include "formgrad/space.hpp"

namespace formgrad {

/// Dirichlet condition on a set of boundary markers. The value is a
/// closed-form expression of the spatial coordinate (or a constant) with
/// the space's value shape. The constrained dof set consists of all dofs
/// whose nodes lie on marked facets.
struct DirichletBC {
  std::vector<int> markers;
  std::shared_ptr<const FunctionSpace> space;
  Expr value;

  static DirichletBC zero(std::shared_ptr<const FunctionSpace> space,
                          std::vector<int> markers);
};

/// Sorted unique global dofs constrained by the condition. Throws when a
/// marker does not exist on the mesh boundary.
std::vector<int> constrained_dofs(const DirichletBC& bc);

/// Union of constrained dofs over several conditions, sorted unique.
std::vector<int> constrained_dofs(std::span<const DirichletBC> bcs);

/// Sets f's constrained dofs to the interpolated boundary values.
void apply_bc_to_function(Function& f, const DirichletBC& bc);

}  // namespace formgrad
