// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/pullback.hpp"

#include <string>

#include "formgrad/derivative.hpp"
#include "formgrad/space.hpp"

namespace formgrad {

namespace {

[[noreturn]] void unsupported(const std::string& what) {
  throw Error("pull_back: unsupported integrand, " + what);
}

Expr lower_gradients(const Expr& e);

// Gradient of an already-lowered expression, pushed down to terminals.
// Terminal gradients stay as Grad nodes for the reference mapping.
Expr lower_grad(const Expr& a) {
  using K = ExprKind;
  switch (a->kind()) {
    case K::Coefficient:
    case K::Argument:
      return grad(a);
    case K::SpatialCoordinate:
      return identity_matrix();
    case K::Constant:
      return zero_expr(a->shape() == ValueShape::Scalar ? ValueShape::Vector
                                                        : ValueShape::Matrix);
    case K::Sum:
      return lower_grad(a->child(0)) + lower_grad(a->child(1));
    case K::Product: {
      const Expr &p = a->child(0), &q = a->child(1);
      if (p->shape() == ValueShape::Scalar && q->shape() == ValueShape::Scalar)
        return p * lower_grad(q) + q * lower_grad(p);
      if (p->shape() == ValueShape::Scalar)  // q vector
        return p * lower_grad(q) + outer(q, lower_grad(p));
      if (q->shape() == ValueShape::Scalar)  // p vector
        return q * lower_grad(p) + outer(p, lower_grad(q));
      unsupported("gradient of a product of non-scalars");
    }
    case K::Division: {
      const Expr &n = a->child(0), &d = a->child(1);
      const Expr dn = lower_grad(n) / d;
      if (n->shape() == ValueShape::Scalar)
        return dn - (n * lower_grad(d)) / (d * d);
      if (n->shape() == ValueShape::Vector)
        return dn - outer(n, lower_grad(d)) / (d * d);
      unsupported("gradient of a matrix-valued quotient");
    }
    case K::Inner:
    case K::Dot: {
      const Expr &u = a->child(0), &w = a->child(1);
      if (u->shape() == ValueShape::Scalar && w->shape() == ValueShape::Scalar)
        return u * lower_grad(w) + w * lower_grad(u);
      if (u->shape() == ValueShape::Vector && w->shape() == ValueShape::Vector)
        return dot(transpose(lower_grad(u)), w) +
               dot(transpose(lower_grad(w)), u);
      unsupported("gradient of a contraction with matrix operands");
    }
    case K::Power: {
      const int k = a->int_payload();
      if (k == 0) return zero_expr(ValueShape::Vector);
      return constant(static_cast<double>(k)) * pow(a->child(0), k - 1) *
             lower_grad(a->child(0));
    }
    case K::Sqrt:
      return lower_grad(a->child(0)) / (constant(2.0) * sqrt(a->child(0)));
    case K::Sin:
      return cos(a->child(0)) * lower_grad(a->child(0));
    case K::Cos:
      return -(sin(a->child(0)) * lower_grad(a->child(0)));
    case K::Abs:
      return sign(a->child(0)) * lower_grad(a->child(0));
    case K::Sign:
      return zero_expr(ValueShape::Vector);
    case K::Grad:
      unsupported("second physical gradients (rank-3 tensors)");
    case K::FacetNormal:
      unsupported("gradient of the facet normal");
    default:
      unsupported("gradient of " + to_sexpr(a));
  }
}

Expr lower_gradients(const Expr& e) {
  using K = ExprKind;
  if (e->kind() == K::Grad) return lower_grad(lower_gradients(e->child(0)));
  if (e->kind() == K::Div) return tr(lower_grad(lower_gradients(e->child(0))));
  if (e->children().empty()) return e;

  std::vector<Expr> c;
  c.reserve(e->children().size());
  for (const auto& ch : e->children()) c.push_back(lower_gradients(ch));

  switch (e->kind()) {
    case K::Inner: return inner(c[0], c[1]);
    case K::Dot: return dot(c[0], c[1]);
    case K::Outer: return outer(c[0], c[1]);
    case K::Transpose: return transpose(c[0]);
    case K::Trace: return tr(c[0]);
    case K::Det: return det(c[0]);
    case K::Inverse: return inv(c[0]);
    case K::Sum: return c[0] + c[1];
    case K::Product: return c[0] * c[1];
    case K::Division: return c[0] / c[1];
    case K::Power: return pow(c[0], e->int_payload());
    case K::Sign: return sign(c[0]);
    case K::Abs: return abs(c[0]);
    case K::Sqrt: return sqrt(c[0]);
    case K::Sin: return sin(c[0]);
    case K::Cos: return cos(c[0]);
    case K::RefValue: return ref_value(c[0]);
    case K::RefGrad: return ref_grad(c[0]);
    default:
      throw Error("lower_gradients: unexpected node");
  }
}

struct ReferenceMapper {
  Expr coord;  // coordinate coefficient X
  bool facet = false;

  Expr jacobian() const { return ref_grad(coord); }
  Expr jacobian_inverse() const { return inv(ref_grad(coord)); }

  /// K^T n_ref, the unnormalized pushed-forward normal direction.
  Expr conormal() const {
    return dot(transpose(jacobian_inverse()), reference_normal());
  }

  Expr map(const Expr& e) const {
    using K = ExprKind;
    switch (e->kind()) {
      case K::SpatialCoordinate:
        return ref_value(coord);
      case K::Coefficient:
      case K::Argument:
        return ref_value(e);
      case K::Grad: {
        const Expr& f = e->child(0);
        if (!is_terminal_field(f))
          throw Error("pull_back: gradient not lowered to a terminal");
        if (f->shape() == ValueShape::Scalar)
          return dot(transpose(jacobian_inverse()), ref_grad(f));
        return dot(ref_grad(f), jacobian_inverse());
      }
      case K::FacetNormal: {
        if (!facet)
          unsupported("physical facet normal in a cell integral");
        const Expr q = conormal();
        return q / sqrt(inner(q, q));
      }
      case K::ReferenceNormal:
        if (!facet) unsupported("reference normal in a cell integral");
        return e;
      case K::Constant:
        return e;
      default:
        break;
    }
    if (e->children().empty()) return e;
    std::vector<Expr> c;
    c.reserve(e->children().size());
    for (const auto& ch : e->children()) c.push_back(map(ch));
    switch (e->kind()) {
      case K::Inner: return inner(c[0], c[1]);
      case K::Dot: return dot(c[0], c[1]);
      case K::Outer: return outer(c[0], c[1]);
      case K::Transpose: return transpose(c[0]);
      case K::Trace: return tr(c[0]);
      case K::Det: return det(c[0]);
      case K::Inverse: return inv(c[0]);
      case K::Sum: return c[0] + c[1];
      case K::Product: return c[0] * c[1];
      case K::Division: return c[0] / c[1];
      case K::Power: return pow(c[0], e->int_payload());
      case K::Sign: return sign(c[0]);
      case K::Abs: return abs(c[0]);
      case K::Sqrt: return sqrt(c[0]);
      case K::Sin: return sin(c[0]);
      case K::Cos: return cos(c[0]);
      case K::RefValue: return ref_value(c[0]);
      case K::RefGrad: return ref_grad(c[0]);
      default:
        throw Error("pull_back: unexpected node");
    }
  }
};

}  // namespace

std::shared_ptr<const FunctionSpace> ReferenceForm::argument_space(
    int number) const {
  if (number >= 0 && number < 2 &&
      argument_spaces[static_cast<std::size_t>(number)])
    return argument_spaces[static_cast<std::size_t>(number)];
  for (const auto& t : terms)
    if (auto s = argument_space_of(t.expr, number)) return s;
  return nullptr;
}

ReferenceIntegrand pull_back(const IntegralTerm& term,
                             std::shared_ptr<const Mesh> mesh) {
  ReferenceIntegrand out;
  out.measure = term.measure;
  out.subdomain = term.subdomain;
  out.mesh = mesh;
  out.quad_degree = term.quad_degree
                        ? *term.quad_degree
                        : estimate_quadrature_degree(term.integrand);
  if (out.quad_degree < 1 || out.quad_degree > 20)
    throw Error("pull_back: quadrature degree " +
                std::to_string(out.quad_degree) + " outside [1, 20]");

  ReferenceMapper mapper;
  mapper.coord = coefficient(mesh->coordinate_function());
  mapper.facet = term.measure == Measure::ExteriorFacet;

  const Expr lowered = lower_gradients(term.integrand);
  Expr mapped = mapper.map(lowered);

  const Expr scale = abs(det(mapper.jacobian()));
  if (mapper.facet) {
    const Expr q = mapper.conormal();
    mapped = mapped * (scale * sqrt(inner(q, q)));
  } else {
    mapped = mapped * scale;
  }
  out.expr = simplify_zeros(mapped);
  return out;
}

ReferenceForm pull_back(const Form& form) {
  ReferenceForm out;
  out.arity = form.arity();
  out.mesh = form.mesh_ptr();
  for (int k = 0; k < out.arity; ++k)
    out.argument_spaces[static_cast<std::size_t>(k)] = form.argument_space(k);
  out.terms.reserve(form.terms().size());
  for (const auto& t : form.terms()) out.terms.push_back(pull_back(t, out.mesh));
  return out;
}

namespace {

Expr direction_expr(const Direction& dir, const Mesh& mesh) {
  if (std::holds_alternative<Function>(dir)) {
    const auto& f = std::get<Function>(dir);
    const auto& s = f.space();
    if (&s.mesh() != &mesh || s.degree() != 1 || s.value_size() != 2)
      throw ShapeError(
          "coordinate_derivative: direction function must live on the "
          "mesh's vector P1 coordinate space");
    return coefficient(f);
  }
  const Expr& e = std::get<Expr>(dir);
  if (e->kind() != ExprKind::Argument ||
      e->shape() != ValueShape::Vector ||
      &e->argument_space()->mesh() != &mesh ||
      e->argument_space()->degree() != 1)
    throw ShapeError(
        "coordinate_derivative: direction must be a vector P1 Argument on "
        "the mesh");
  return e;
}

}  // namespace

ReferenceIntegrand coordinate_derivative(const ReferenceIntegrand& ri,
                                         std::span<const Direction> dirs) {
  if (dirs.empty() || dirs.size() > 2)
    throw Error("coordinate_derivative: order must be 1 or 2");
  ReferenceIntegrand out = ri;
  const Function& coord = ri.mesh->coordinate_function();
  for (const auto& dir : dirs)
    out.expr = gateaux_derivative(out.expr, coord, direction_expr(dir, *ri.mesh));
  return out;
}

ReferenceForm shape_derivative(const Form& form, int order) {
  if (order != 1 && order != 2)
    throw Error("shape_derivative: order must be 1 or 2");
  if (form.arity() + order > 2)
    throw Error("shape_derivative: arity " + std::to_string(form.arity()) +
                " + order " + std::to_string(order) + " exceeds 2");
  std::vector<Direction> dirs;
  for (int i = 0; i < order; ++i)
    dirs.emplace_back(
        argument(form.arity() + i, form.mesh_ptr()->coordinate_space()));
  return shape_derivative(form, dirs);
}

ReferenceForm shape_derivative(const Form& form,
                               std::span<const Direction> dirs) {
  int added = 0;
  for (const auto& d : dirs)
    if (std::holds_alternative<Expr>(d)) ++added;
  if (form.arity() + added > 2)
    throw Error("shape_derivative: too many arguments for a rank-2 tensor");

  ReferenceForm out;
  out.arity = form.arity() + added;
  out.mesh = form.mesh_ptr();
  for (int k = 0; k < form.arity(); ++k)
    out.argument_spaces[static_cast<std::size_t>(k)] = form.argument_space(k);
  for (const auto& d : dirs)
    if (std::holds_alternative<Expr>(d)) {
      const Expr& e = std::get<Expr>(d);
      out.argument_spaces[static_cast<std::size_t>(e->int_payload())] =
          e->argument_space();
    }
  out.terms.reserve(form.terms().size());
  for (const auto& t : form.terms())
    out.terms.push_back(coordinate_derivative(pull_back(t, out.mesh), dirs));
  return out;
}

}  // namespace formgrad
