// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/cases.hpp"

#include "formgrad/derivative.hpp"

namespace formgrad {

DomainFunctionalCase make_example1(std::shared_ptr<Mesh> mesh) {
  const Expr x = spatial_coordinate();
  // u(x, y) = x^2 + y^2 - 1 = |x|^2 - 1, independent of any coefficient.
  const Expr u = inner(x, x) - 1.0;
  Form J = dx(u, mesh);
  return {std::move(mesh), std::move(J)};
}

InterpolantFunctionalCase make_example2(std::shared_ptr<Mesh> mesh) {
  const auto space = FunctionSpace::create(mesh, 1, 1);
  Function v(space, "v");
  const Expr x = spatial_coordinate();
  interpolate(sin(component(x, 0)) * cos(component(x, 1)), v);

  const Expr vc = coefficient(v);
  Form J = dx(vc + inner(grad(vc), grad(vc)), mesh);
  return {std::move(mesh), std::move(v), std::move(J)};
}

namespace {
ConstrainedCase make_constrained_case(std::shared_ptr<Mesh> mesh,
                                      const Expr& f);
}

ConstrainedCase make_example3(std::shared_ptr<Mesh> mesh) {
  // Weak Neumann problem: grad(u).grad(phi) + u phi - f phi = 0, f = xy.
  const Expr x = spatial_coordinate();
  return make_constrained_case(std::move(mesh),
                               component(x, 0) * component(x, 1));
}

void ConstrainedCase::solve_state(const NewtonOptions& options) {
  newton_solve(residual, u, {}, options);
}

void ConstrainedCase::solve_adjoint(const LinearOptions& options) {
  adjoint_solve(lagrangian, u, p, {}, options);
}

Form volume_form(std::shared_ptr<const Mesh> mesh) {
  return dx(constant(1.0), std::move(mesh));
}

namespace {

ConstrainedCase make_constrained_case(std::shared_ptr<Mesh> mesh,
                                      const Expr& f) {
  auto space = FunctionSpace::create(mesh, 1, 1);
  Function u_fn(space, "u");
  Function p_fn(space, "p");

  const Expr u = coefficient(u_fn);
  const Expr p = coefficient(p_fn);
  const Expr phi = argument(0, space);

  Form residual = dx(inner(grad(u), grad(phi)) + u * phi - f * phi, mesh);
  Form J = dx(u, mesh);
  Form lagrangian = J + dx(inner(grad(u), grad(p)) + u * p - f * p, mesh);

  return ConstrainedCase{std::move(mesh), std::move(space), std::move(u_fn),
                         std::move(p_fn), f, std::move(residual), std::move(J),
                         std::move(lagrangian)};
}

}  // namespace

ConstrainedCase make_regression_case(std::shared_ptr<Mesh> mesh) {
  const Expr y = component(spatial_coordinate(), 1);
  return make_constrained_case(std::move(mesh),
                               (y - 0.5) * (y - 0.5) - 0.2);
}

}  // namespace formgrad
