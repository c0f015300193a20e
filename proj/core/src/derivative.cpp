// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/derivative.hpp"

#include <algorithm>

#include "formgrad/space.hpp"

namespace formgrad {

namespace {

bool is_one(const Expr& e) {
  return e->kind() == ExprKind::Constant && e->shape() == ValueShape::Scalar &&
         e->literal()[0] == 1.0;
}

Expr rebuild(const Expr& e, std::vector<Expr> children) {
  switch (e->kind()) {
    case ExprKind::Grad: return grad(std::move(children[0]));
    case ExprKind::Div: return div(std::move(children[0]));
    case ExprKind::Inner:
      return inner(std::move(children[0]), std::move(children[1]));
    case ExprKind::Dot:
      return dot(std::move(children[0]), std::move(children[1]));
    case ExprKind::Outer:
      return outer(std::move(children[0]), std::move(children[1]));
    case ExprKind::Transpose: return transpose(std::move(children[0]));
    case ExprKind::Trace: return tr(std::move(children[0]));
    case ExprKind::Det: return det(std::move(children[0]));
    case ExprKind::Inverse: return inv(std::move(children[0]));
    case ExprKind::Sum:
      return std::move(children[0]) + std::move(children[1]);
    case ExprKind::Product:
      return std::move(children[0]) * std::move(children[1]);
    case ExprKind::Division:
      return std::move(children[0]) / std::move(children[1]);
    case ExprKind::Power: return pow(std::move(children[0]), e->int_payload());
    case ExprKind::Sign: return sign(std::move(children[0]));
    case ExprKind::Abs: return abs(std::move(children[0]));
    case ExprKind::Sqrt: return sqrt(std::move(children[0]));
    case ExprKind::Sin: return sin(std::move(children[0]));
    case ExprKind::Cos: return cos(std::move(children[0]));
    case ExprKind::RefValue: return ref_value(std::move(children[0]));
    case ExprKind::RefGrad: return ref_grad(std::move(children[0]));
    default:
      throw Error("rebuild: terminal node");
  }
}

class GateauxEngine {
 public:
  GateauxEngine(const Function& w, const Expr& direction)
      : w_id_(w.id()), dir_(direction) {
    if (!is_terminal_field(direction))
      throw ShapeError(
          "gateaux_derivative: direction must be an Argument or a "
          "Coefficient");
    if (direction->shape() != w.space().value_shape())
      throw ShapeError("gateaux_derivative: direction shape " +
                       to_string(direction->shape()) +
                       " does not match coefficient shape " +
                       to_string(w.space().value_shape()));
  }

  Expr run(const Expr& e) {
    using K = ExprKind;
    switch (e->kind()) {
      case K::Constant:
      case K::SpatialCoordinate:
      case K::FacetNormal:
      case K::ReferenceNormal:
      case K::Argument:
        return zero_expr(e->shape());
      case K::Coefficient:
        return e->coefficient()->id() == w_id_ ? dir_ : zero_expr(e->shape());
      case K::RefValue:
        return is_hit(e->child(0)) ? ref_value(dir_) : zero_expr(e->shape());
      case K::RefGrad:
        return is_hit(e->child(0)) ? ref_grad(dir_) : zero_expr(e->shape());
      case K::Grad: {
        // Linear operator: d(grad e) = grad(de). Valid only when de is a
        // spatial field, which holds for the terminal-bearing expressions
        // produced in physical space.
        const Expr de = run(e->child(0));
        if (is_zero(de)) return zero_expr(e->shape());
        return grad(de);
      }
      case K::Div: {
        const Expr de = run(e->child(0));
        if (is_zero(de)) return zero_expr(e->shape());
        return div(de);
      }
      case K::Sum:
        return run(e->child(0)) + run(e->child(1));
      case K::Product:
        return run(e->child(0)) * e->child(1) + e->child(0) * run(e->child(1));
      case K::Division: {
        const Expr &a = e->child(0), &b = e->child(1);
        return run(a) / b - (a * run(b)) / (b * b);
      }
      case K::Inner:
        return inner(run(e->child(0)), e->child(1)) +
               inner(e->child(0), run(e->child(1)));
      case K::Dot:
        return dot(run(e->child(0)), e->child(1)) +
               dot(e->child(0), run(e->child(1)));
      case K::Outer:
        return outer(run(e->child(0)), e->child(1)) +
               outer(e->child(0), run(e->child(1)));
      case K::Transpose:
        return transpose(run(e->child(0)));
      case K::Trace:
        return tr(run(e->child(0)));
      case K::Det: {
        // d det(A)[H] = det(A) tr(A^-1 H)
        const Expr& a = e->child(0);
        return det(a) * tr(dot(inv(a), run(a)));
      }
      case K::Inverse: {
        // d A^-1 [H] = -A^-1 H A^-1
        const Expr& a = e->child(0);
        return -dot(dot(inv(a), run(a)), inv(a));
      }
      case K::Power: {
        const int k = e->int_payload();
        if (k == 0) return constant(0.0);
        return constant(static_cast<double>(k)) * pow(e->child(0), k - 1) *
               run(e->child(0));
      }
      case K::Abs:
        // sign(0) = 0 by definition; |det DF| > 0 on valid meshes, so the
        // kink is never hit there.
        return sign(e->child(0)) * run(e->child(0));
      case K::Sign:
        return constant(0.0);
      case K::Sqrt:
        return run(e->child(0)) / (constant(2.0) * sqrt(e->child(0)));
      case K::Sin:
        return cos(e->child(0)) * run(e->child(0));
      case K::Cos:
        return -(sin(e->child(0)) * run(e->child(0)));
    }
    throw Error("gateaux_derivative: unhandled node");
  }

 private:
  bool is_hit(const Expr& terminal) const {
    return terminal->kind() == ExprKind::Coefficient &&
           terminal->coefficient()->id() == w_id_;
  }

  int w_id_;
  Expr dir_;
};

}  // namespace

Expr simplify_zeros(const Expr& e) {
  if (e->children().empty()) return e;

  std::vector<Expr> c;
  c.reserve(e->children().size());
  bool changed = false;
  for (const auto& ch : e->children()) {
    c.push_back(simplify_zeros(ch));
    changed = changed || c.back().get() != ch.get();
  }

  using K = ExprKind;
  switch (e->kind()) {
    case K::Sum:
      if (is_zero(c[0])) return c[1];
      if (is_zero(c[1])) return c[0];
      break;
    case K::Product:
      if (is_zero(c[0]) || is_zero(c[1])) return zero_expr(e->shape());
      if (is_one(c[0])) return c[1];
      if (is_one(c[1])) return c[0];
      break;
    case K::Division:
      if (is_zero(c[0])) return zero_expr(e->shape());
      break;
    case K::Inner:
    case K::Dot:
    case K::Outer:
      if (is_zero(c[0]) || is_zero(c[1])) return zero_expr(e->shape());
      break;
    case K::Grad:
    case K::Div:
    case K::Transpose:
    case K::Trace:
      if (is_zero(c[0])) return zero_expr(e->shape());
      break;
    case K::Power: {
      const int k = e->int_payload();
      if (k == 0) return constant(1.0);
      if (k == 1) return c[0];
      if (is_zero(c[0]) && k > 0) return constant(0.0);
      break;
    }
    default:
      break;
  }
  if (!changed) return e;
  return rebuild(e, std::move(c));
}

Expr gateaux_derivative(const Expr& e, const Function& w,
                        const Expr& direction) {
  GateauxEngine engine(w, direction);
  return simplify_zeros(engine.run(e));
}

Expr replace(const Expr& e, const ReplacementMap& map) {
  using K = ExprKind;
  if (e->kind() == K::Coefficient) {
    const auto it = map.coefficients.find(e->coefficient()->id());
    if (it == map.coefficients.end()) return e;
    if (it->second->shape() != e->shape())
      throw ShapeError("replace: replacement shape " +
                       to_string(it->second->shape()) +
                       " does not match coefficient shape " +
                       to_string(e->shape()));
    return it->second;
  }
  if (e->kind() == K::Argument) {
    const auto it = map.arguments.find(e->int_payload());
    if (it == map.arguments.end()) return e;
    if (it->second->shape() != e->shape())
      throw ShapeError("replace: replacement shape " +
                       to_string(it->second->shape()) +
                       " does not match argument shape " +
                       to_string(e->shape()));
    return it->second;
  }
  if (e->children().empty()) return e;

  std::vector<Expr> c;
  c.reserve(e->children().size());
  bool changed = false;
  for (const auto& ch : e->children()) {
    c.push_back(replace(ch, map));
    changed = changed || c.back().get() != ch.get();
  }
  if (!changed) return e;
  // ref_value/ref_grad fold constants and reject non-terminal replacements.
  return rebuild(e, std::move(c));
}

namespace {

int degree_of(const Expr& e) {
  using K = ExprKind;
  switch (e->kind()) {
    case K::Constant:
    case K::FacetNormal:
    case K::ReferenceNormal:
    case K::Sign:
      return 0;
    case K::SpatialCoordinate:
      return 1;
    case K::Coefficient:
      return e->coefficient()->space().degree();
    case K::Argument:
      return e->argument_space()->degree();
    case K::RefValue:
      return degree_of(e->child(0));
    case K::RefGrad:
    case K::Grad:
    case K::Div:
      return std::max(0, degree_of(e->child(0)) - 1);
    case K::Sum:
      return std::max(degree_of(e->child(0)), degree_of(e->child(1)));
    case K::Product:
    case K::Inner:
    case K::Dot:
    case K::Outer:
      return degree_of(e->child(0)) + degree_of(e->child(1));
    case K::Transpose:
    case K::Trace:
      return degree_of(e->child(0));
    case K::Det: {
      // Affine-cell Jacobians are degree 0 and so is their determinant.
      const int d = degree_of(e->child(0));
      return d == 0 ? 0 : 2 * d;
    }
    case K::Inverse: {
      const int d = degree_of(e->child(0));
      return d == 0 ? 0 : d + 2;  // rational in general
    }
    case K::Division: {
      const int dn = degree_of(e->child(0));
      const int dd = degree_of(e->child(1));
      return dn + (dd == 0 ? 0 : dd + 2);
    }
    case K::Power: {
      const int k = e->int_payload();
      const int d = degree_of(e->child(0));
      return k >= 0 ? k * d : -k * d + 2;
    }
    case K::Abs:
    case K::Sqrt:
    case K::Sin:
    case K::Cos:
      return degree_of(e->child(0)) + 2;
  }
  return 2;
}

}  // namespace

int estimate_quadrature_degree(const Expr& e) {
  return std::clamp(degree_of(e), 1, 20);
}

}  // namespace formgrad
