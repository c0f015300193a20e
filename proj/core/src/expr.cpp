// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/expr.hpp"

#include <cstdio>
#include <unordered_map>

#include "formgrad/space.hpp"

namespace formgrad {

std::string to_string(ValueShape s) {
  switch (s) {
    case ValueShape::Scalar: return "scalar";
    case ValueShape::Vector: return "vector-2";
    case ValueShape::Matrix: return "matrix-2x2";
  }
  return "?";
}

ExprNode::ExprNode(ExprKind kind, ValueShape shape, std::vector<Expr> children)
    : kind_(kind), shape_(shape), children_(std::move(children)) {}

namespace {

Expr make(ExprKind kind, ValueShape shape, std::vector<Expr> children) {
  return std::make_shared<ExprNode>(kind, shape, std::move(children));
}

[[noreturn]] void shape_error(const std::string& op, const Expr& a) {
  throw ShapeError(op + ": operand has shape " + to_string(a->shape()));
}

[[noreturn]] void shape_error(const std::string& op, const Expr& a,
                              const Expr& b) {
  throw ShapeError(op + ": operand shapes " + to_string(a->shape()) + " and " +
                   to_string(b->shape()) + " are incompatible");
}

}  // namespace

Expr constant(double v) {
  auto node = std::make_shared<ExprNode>(ExprKind::Constant, ValueShape::Scalar,
                                         std::vector<Expr>{});
  node->literal_ = {v, 0, 0, 0};
  return node;
}

Expr constant(const Vec2& v) {
  auto node = std::make_shared<ExprNode>(ExprKind::Constant, ValueShape::Vector,
                                         std::vector<Expr>{});
  node->literal_ = {v[0], v[1], 0, 0};
  return node;
}

Expr constant(const Mat22& m) {
  auto node = std::make_shared<ExprNode>(ExprKind::Constant, ValueShape::Matrix,
                                         std::vector<Expr>{});
  node->literal_ = m;
  return node;
}

Expr zero_expr(ValueShape s) {
  switch (s) {
    case ValueShape::Scalar: return constant(0.0);
    case ValueShape::Vector: return constant(Vec2{0, 0});
    case ValueShape::Matrix: return constant(Mat22{0, 0, 0, 0});
  }
  throw Error("zero_expr: bad shape");
}

Expr identity_matrix() { return constant(Mat22{1, 0, 0, 1}); }

Expr spatial_coordinate() {
  return make(ExprKind::SpatialCoordinate, ValueShape::Vector, {});
}

Expr facet_normal() {
  return make(ExprKind::FacetNormal, ValueShape::Vector, {});
}

Expr reference_normal() {
  return make(ExprKind::ReferenceNormal, ValueShape::Vector, {});
}

Expr coefficient(const Function& f) {
  auto node = std::make_shared<ExprNode>(
      ExprKind::Coefficient, f.space().value_shape(), std::vector<Expr>{});
  node->function_ = std::make_shared<const Function>(f);
  return node;
}

Expr argument(int number, std::shared_ptr<const FunctionSpace> space) {
  if (number != 0 && number != 1)
    throw Error("argument: number must be 0 (test) or 1 (trial)");
  auto node = std::make_shared<ExprNode>(
      ExprKind::Argument, space->value_shape(), std::vector<Expr>{});
  node->int_payload_ = number;
  node->space_ = std::move(space);
  return node;
}

Expr grad(Expr a) {
  switch (a->shape()) {
    case ValueShape::Scalar:
      return make(ExprKind::Grad, ValueShape::Vector, {std::move(a)});
    case ValueShape::Vector:
      return make(ExprKind::Grad, ValueShape::Matrix, {std::move(a)});
    case ValueShape::Matrix:
      shape_error("grad", a);
  }
  throw Error("grad: bad shape");
}

Expr div(Expr a) {
  if (a->shape() != ValueShape::Vector) shape_error("div", a);
  return make(ExprKind::Div, ValueShape::Scalar, {std::move(a)});
}

Expr inner(Expr a, Expr b) {
  if (a->shape() != b->shape()) shape_error("inner", a, b);
  return make(ExprKind::Inner, ValueShape::Scalar,
              {std::move(a), std::move(b)});
}

Expr dot(Expr a, Expr b) {
  const auto sa = a->shape(), sb = b->shape();
  ValueShape out;
  if (sa == ValueShape::Vector && sb == ValueShape::Vector)
    out = ValueShape::Scalar;
  else if (sa == ValueShape::Matrix && sb == ValueShape::Vector)
    out = ValueShape::Vector;
  else if (sa == ValueShape::Vector && sb == ValueShape::Matrix)
    out = ValueShape::Vector;
  else if (sa == ValueShape::Matrix && sb == ValueShape::Matrix)
    out = ValueShape::Matrix;
  else
    shape_error("dot", a, b);
  return make(ExprKind::Dot, out, {std::move(a), std::move(b)});
}

Expr outer(Expr a, Expr b) {
  if (a->shape() != ValueShape::Vector || b->shape() != ValueShape::Vector)
    shape_error("outer", a, b);
  return make(ExprKind::Outer, ValueShape::Matrix,
              {std::move(a), std::move(b)});
}

Expr transpose(Expr a) {
  if (a->shape() != ValueShape::Matrix) shape_error("transpose", a);
  return make(ExprKind::Transpose, ValueShape::Matrix, {std::move(a)});
}

Expr tr(Expr a) {
  if (a->shape() != ValueShape::Matrix) shape_error("tr", a);
  return make(ExprKind::Trace, ValueShape::Scalar, {std::move(a)});
}

Expr det(Expr a) {
  if (a->shape() != ValueShape::Matrix) shape_error("det", a);
  return make(ExprKind::Det, ValueShape::Scalar, {std::move(a)});
}

Expr inv(Expr a) {
  if (a->shape() != ValueShape::Matrix) shape_error("inv", a);
  return make(ExprKind::Inverse, ValueShape::Matrix, {std::move(a)});
}

Expr pow(Expr a, int exponent) {
  if (a->shape() != ValueShape::Scalar) shape_error("pow", a);
  auto node = std::make_shared<ExprNode>(ExprKind::Power, ValueShape::Scalar,
                                         std::vector<Expr>{std::move(a)});
  node->int_payload_ = exponent;
  return node;
}

namespace {
Expr scalar_unary(ExprKind kind, const char* name, Expr a) {
  if (a->shape() != ValueShape::Scalar) shape_error(name, a);
  return make(kind, ValueShape::Scalar, {std::move(a)});
}
}  // namespace

Expr sign(Expr a) { return scalar_unary(ExprKind::Sign, "sign", std::move(a)); }
Expr abs(Expr a) { return scalar_unary(ExprKind::Abs, "abs", std::move(a)); }
Expr sqrt(Expr a) { return scalar_unary(ExprKind::Sqrt, "sqrt", std::move(a)); }
Expr sin(Expr a) { return scalar_unary(ExprKind::Sin, "sin", std::move(a)); }
Expr cos(Expr a) { return scalar_unary(ExprKind::Cos, "cos", std::move(a)); }

Expr ref_value(Expr terminal) {
  if (terminal->kind() == ExprKind::Constant) return terminal;
  if (!is_terminal_field(terminal))
    throw ShapeError("ref_value requires a coefficient or argument");
  const ValueShape shape = terminal->shape();
  return make(ExprKind::RefValue, shape, {std::move(terminal)});
}

Expr ref_grad(Expr terminal) {
  if (terminal->kind() == ExprKind::Constant)
    return zero_expr(terminal->shape() == ValueShape::Scalar
                         ? ValueShape::Vector
                         : ValueShape::Matrix);
  if (!is_terminal_field(terminal))
    throw ShapeError("ref_grad requires a coefficient or argument");
  const auto out = terminal->shape() == ValueShape::Scalar
                       ? ValueShape::Vector
                       : ValueShape::Matrix;
  if (terminal->shape() == ValueShape::Matrix) shape_error("ref_grad", terminal);
  return make(ExprKind::RefGrad, out, {std::move(terminal)});
}

Expr operator+(Expr a, Expr b) {
  if (a->shape() != b->shape()) shape_error("sum", a, b);
  const ValueShape shape = a->shape();
  return make(ExprKind::Sum, shape, {std::move(a), std::move(b)});
}

Expr operator*(Expr a, Expr b) {
  const auto sa = a->shape(), sb = b->shape();
  if (sa != ValueShape::Scalar && sb != ValueShape::Scalar)
    shape_error("product (one operand must be scalar)", a, b);
  const auto out = sa == ValueShape::Scalar ? sb : sa;
  return make(ExprKind::Product, out, {std::move(a), std::move(b)});
}

Expr operator-(Expr a) { return constant(-1.0) * std::move(a); }

Expr operator-(Expr a, Expr b) { return std::move(a) + (-std::move(b)); }

Expr operator/(Expr a, Expr b) {
  if (b->shape() != ValueShape::Scalar)
    shape_error("division (denominator must be scalar)", a, b);
  const ValueShape shape = a->shape();
  return make(ExprKind::Division, shape, {std::move(a), std::move(b)});
}

Expr operator*(double a, Expr b) { return constant(a) * std::move(b); }
Expr operator*(Expr a, double b) { return std::move(a) * constant(b); }
Expr operator/(Expr a, double b) { return std::move(a) / constant(b); }
Expr operator+(Expr a, double b) { return std::move(a) + constant(b); }
Expr operator+(double a, Expr b) { return constant(a) + std::move(b); }
Expr operator-(Expr a, double b) { return std::move(a) - constant(b); }
Expr operator-(double a, Expr b) { return constant(a) - std::move(b); }

Expr as_vector(Expr x, Expr y) {
  if (x->shape() != ValueShape::Scalar || y->shape() != ValueShape::Scalar)
    shape_error("as_vector", x, y);
  return std::move(x) * constant(Vec2{1, 0}) +
         std::move(y) * constant(Vec2{0, 1});
}

Expr component(Expr v, int i) {
  if (v->shape() != ValueShape::Vector) shape_error("component", v);
  return dot(std::move(v), constant(i == 0 ? Vec2{1, 0} : Vec2{0, 1}));
}

bool is_zero(const Expr& e) {
  if (e->kind() != ExprKind::Constant) return false;
  for (double v : e->literal())
    if (v != 0.0) return false;
  return true;
}

bool is_terminal_field(const Expr& e) {
  return e->kind() == ExprKind::Coefficient || e->kind() == ExprKind::Argument;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind() != b->kind() || a->shape() != b->shape()) return false;
  switch (a->kind()) {
    case ExprKind::Constant:
      return a->literal() == b->literal();
    case ExprKind::Coefficient:
      return a->coefficient()->id() == b->coefficient()->id();
    case ExprKind::Argument:
      return a->int_payload() == b->int_payload() &&
             a->argument_space()->same_space(*b->argument_space());
    case ExprKind::Power:
      if (a->int_payload() != b->int_payload()) return false;
      break;
    default:
      break;
  }
  if (a->num_children() != b->num_children()) return false;
  for (int i = 0; i < a->num_children(); ++i)
    if (!structurally_equal(a->child(i), b->child(i))) return false;
  return true;
}

int max_argument_number(const Expr& e) {
  int result = -1;
  if (e->kind() == ExprKind::Argument)
    result = std::max(result, e->int_payload());
  for (const auto& c : e->children())
    result = std::max(result, max_argument_number(c));
  return result;
}

namespace {
void collect_coefficients(const Expr& e,
                          std::vector<std::shared_ptr<const Function>>& out) {
  if (e->kind() == ExprKind::Coefficient) {
    for (const auto& f : out)
      if (f->id() == e->coefficient()->id()) return;
    out.push_back(e->coefficient());
    return;
  }
  for (const auto& c : e->children()) collect_coefficients(c, out);
}
}  // namespace

std::vector<std::shared_ptr<const Function>> coefficients_of(const Expr& e) {
  std::vector<std::shared_ptr<const Function>> out;
  collect_coefficients(e, out);
  return out;
}

std::shared_ptr<const FunctionSpace> argument_space_of(const Expr& e,
                                                       int number) {
  if (e->kind() == ExprKind::Argument && e->int_payload() == number)
    return e->argument_space();
  for (const auto& c : e->children())
    if (auto s = argument_space_of(c, number)) return s;
  return nullptr;
}

namespace {

std::string format_literal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* kind_name(ExprKind k) {
  switch (k) {
    case ExprKind::Constant: return "const";
    case ExprKind::SpatialCoordinate: return "x";
    case ExprKind::FacetNormal: return "n";
    case ExprKind::ReferenceNormal: return "nref";
    case ExprKind::Coefficient: return "coeff";
    case ExprKind::Argument: return "arg";
    case ExprKind::RefValue: return "refval";
    case ExprKind::RefGrad: return "refgrad";
    case ExprKind::Grad: return "grad";
    case ExprKind::Div: return "div";
    case ExprKind::Inner: return "inner";
    case ExprKind::Dot: return "dot";
    case ExprKind::Outer: return "outer";
    case ExprKind::Transpose: return "transpose";
    case ExprKind::Trace: return "tr";
    case ExprKind::Det: return "det";
    case ExprKind::Inverse: return "inv";
    case ExprKind::Sum: return "+";
    case ExprKind::Product: return "*";
    case ExprKind::Division: return "/";
    case ExprKind::Power: return "pow";
    case ExprKind::Sign: return "sign";
    case ExprKind::Abs: return "abs";
    case ExprKind::Sqrt: return "sqrt";
    case ExprKind::Sin: return "sin";
    case ExprKind::Cos: return "cos";
  }
  return "?";
}

void print_sexpr(const Expr& e, std::string& out) {
  switch (e->kind()) {
    case ExprKind::Constant: {
      const int n = value_size(e->shape());
      if (n == 1) {
        out += format_literal(e->literal()[0]);
      } else {
        out += "(lit";
        for (int i = 0; i < n; ++i) out += " " + format_literal(e->literal()[i]);
        out += ")";
      }
      return;
    }
    case ExprKind::SpatialCoordinate: out += "x"; return;
    case ExprKind::FacetNormal: out += "n"; return;
    case ExprKind::ReferenceNormal: out += "nref"; return;
    case ExprKind::Coefficient: {
      const auto& f = *e->coefficient();
      out += f.name().empty() ? "c" + std::to_string(f.id()) : f.name();
      return;
    }
    case ExprKind::Argument:
      out += "v" + std::to_string(e->int_payload());
      return;
    default:
      break;
  }
  out += "(";
  out += kind_name(e->kind());
  if (e->kind() == ExprKind::Power)
    out += " " + std::to_string(e->int_payload());
  for (const auto& c : e->children()) {
    out += " ";
    print_sexpr(c, out);
  }
  out += ")";
}

}  // namespace

std::string to_sexpr(const Expr& e) {
  std::string out;
  print_sexpr(e, out);
  return out;
}

}  // namespace formgrad
