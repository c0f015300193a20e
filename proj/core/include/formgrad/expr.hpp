// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "formgrad/errors.hpp"
#include "formgrad/types.hpp"

namespace formgrad {

class Function;
class FunctionSpace;

/// Node kinds of the symbolic expression language.
///
/// Terminals: Constant, SpatialCoordinate, FacetNormal (physical outward
/// normal, exterior facets only), ReferenceNormal (outward normal of the
/// reference cell, appears in pulled-back integrands), Coefficient and
/// Argument.
///
/// RefValue / RefGrad wrap a Coefficient or Argument and denote its value,
/// respectively reference gradient, on the reference cell. They are produced
/// by the pullback and by Gateaux differentiation of pulled-back integrands;
/// user-facing physical-space expressions use Grad instead.
enum class ExprKind : std::uint8_t {
  Constant,
  SpatialCoordinate,
  FacetNormal,
  ReferenceNormal,
  Coefficient,
  Argument,
  RefValue,
  RefGrad,
  Grad,
  Div,
  Inner,
  Dot,
  Outer,
  Transpose,
  Trace,
  Det,
  Inverse,
  Sum,
  Product,
  Division,
  Power,
  Sign,
  Abs,
  Sqrt,
  Sin,
  Cos,
};

class ExprNode;

/// Expressions are immutable trees shared by pointer; all operations on
/// them are pure and safe to use from multiple threads.
using Expr = std::shared_ptr<const ExprNode>;

class ExprNode {
 public:
  ExprKind kind() const { return kind_; }
  ValueShape shape() const { return shape_; }

  const std::vector<Expr>& children() const { return children_; }
  const Expr& child(int i) const {
    return children_[static_cast<std::size_t>(i)];
  }
  int num_children() const { return static_cast<int>(children_.size()); }

  /// Constant payload (entries beyond the value size are zero).
  const std::array<double, 4>& literal() const { return literal_; }

  /// Power exponent or Argument number, depending on kind.
  int int_payload() const { return int_payload_; }

  /// Coefficient payload. Shares dof storage with the user's Function.
  const std::shared_ptr<const Function>& coefficient() const {
    return function_;
  }

  /// Argument payload.
  const std::shared_ptr<const FunctionSpace>& argument_space() const {
    return space_;
  }

  ExprNode(ExprKind kind, ValueShape shape, std::vector<Expr> children);

 private:
  friend Expr constant(double);
  friend Expr constant(const Vec2&);
  friend Expr constant(const Mat22&);
  friend Expr coefficient(const Function&);
  friend Expr argument(int, std::shared_ptr<const FunctionSpace>);
  friend Expr pow(Expr, int);

  ExprKind kind_;
  ValueShape shape_;
  std::vector<Expr> children_;
  std::array<double, 4> literal_{};
  int int_payload_ = 0;
  std::shared_ptr<const Function> function_;
  std::shared_ptr<const FunctionSpace> space_;
};

// Terminal constructors.
Expr constant(double v);
Expr constant(const Vec2& v);
Expr constant(const Mat22& m);
Expr zero_expr(ValueShape s);
Expr identity_matrix();
Expr spatial_coordinate();
Expr facet_normal();
Expr reference_normal();
Expr coefficient(const Function& f);
Expr argument(int number, std::shared_ptr<const FunctionSpace> space);

// Operators. All constructors shape-check their operands and throw
// ShapeError naming both operand shapes on mismatch.
Expr grad(Expr a);
Expr div(Expr a);
Expr inner(Expr a, Expr b);
Expr dot(Expr a, Expr b);
Expr outer(Expr a, Expr b);
Expr transpose(Expr a);
Expr tr(Expr a);
Expr det(Expr a);
Expr inv(Expr a);
Expr pow(Expr a, int exponent);
Expr sign(Expr a);
Expr abs(Expr a);
Expr sqrt(Expr a);
Expr sin(Expr a);
Expr cos(Expr a);
Expr ref_value(Expr terminal);
Expr ref_grad(Expr terminal);

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator-(Expr a);
Expr operator*(Expr a, Expr b);
Expr operator*(double a, Expr b);
Expr operator*(Expr a, double b);
Expr operator/(Expr a, Expr b);
Expr operator/(Expr a, double b);
Expr operator+(Expr a, double b);
Expr operator+(double a, Expr b);
Expr operator-(Expr a, double b);
Expr operator-(double a, Expr b);

/// Builds the 2-vector (x, y) from two scalar expressions.
Expr as_vector(Expr x, Expr y);

/// Extracts component i of a vector expression (dot with a basis vector).
Expr component(Expr v, int i);

bool is_zero(const Expr& e);
bool is_terminal_field(const Expr& e);  // Coefficient or Argument
bool structurally_equal(const Expr& a, const Expr& b);

/// Largest Argument number present, or -1 when the expression has none.
int max_argument_number(const Expr& e);

/// Collects the distinct coefficients of an expression in first-appearance
/// order (deterministic).
std::vector<std::shared_ptr<const Function>> coefficients_of(const Expr& e);

/// Space of Argument `number`, or nullptr when absent.
std::shared_ptr<const FunctionSpace> argument_space_of(const Expr& e,
                                                       int number);

/// Deterministic s-expression rendering for debugging and golden tests.
std::string to_sexpr(const Expr& e);

}  // namespace formgrad
