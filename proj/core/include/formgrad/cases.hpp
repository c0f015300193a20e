// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "formgrad/form.hpp"
#include "formgrad/solve.hpp"
#include "formgrad/space.hpp"

namespace formgrad {

/// The built-in example problems used by the CLI runners and the
/// verification suites.

/// J = int (x^2 + y^2 - 1) dx, integrand independent of any coefficient.
struct DomainFunctionalCase {
  std::shared_ptr<Mesh> mesh;
  Form J;
};
DomainFunctionalCase make_example1(std::shared_ptr<Mesh> mesh);

/// J = int v + |grad v|^2 dx with v the P1 interpolant of sin(x) cos(y).
struct InterpolantFunctionalCase {
  std::shared_ptr<Mesh> mesh;
  Function v;
  Form J;
};
InterpolantFunctionalCase make_example2(std::shared_ptr<Mesh> mesh);

/// PDE-constrained case: J = int u dx with u solving the Neumann problem
/// -lap(u) + u = f, f = x y, in weak form
/// int grad(u).grad(v) + u v - f v dx = 0. The Lagrangian adds the residual
/// tested with the adjoint p.
struct ConstrainedCase {
  std::shared_ptr<Mesh> mesh;
  std::shared_ptr<const FunctionSpace> state_space;
  Function u;
  Function p;
  Expr f;          // closed form in x
  Form residual;   // arity 1 in u
  Form J;          // arity 0
  Form lagrangian; // arity 0 in (u, p)

  void solve_state(const NewtonOptions& options = {});
  void solve_adjoint(const LinearOptions& options = {});
};
ConstrainedCase make_example3(std::shared_ptr<Mesh> mesh);

/// Volume functional int 1 dx.
Form volume_form(std::shared_ptr<const Mesh> mesh);

/// Descent-regression instance of the constrained case: same weak operator
/// as make_example3 but with the restoring source f = (y - 1/2)^2 - 1/5,
/// whose volume-penalized optimum is a slightly shrunk square. With the
/// left/right sides fixed, fixed-step descent contracts the gradient by
/// orders of magnitude within tens of iterations.
ConstrainedCase make_regression_case(std::shared_ptr<Mesh> mesh);

}  // namespace formgrad
