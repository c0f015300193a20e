// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "formgrad/expr.hpp"
#include "formgrad/mesh.hpp"

namespace formgrad {

enum class Measure : std::uint8_t { Cell, ExteriorFacet };

inline constexpr int kEverywhere = -1;

/// One integral contribution: a scalar integrand over a cell or exterior
/// facet measure, optionally restricted to a subdomain marker, with an
/// automatic or explicit quadrature degree.
struct IntegralTerm {
  Expr integrand;
  Measure measure = Measure::Cell;
  int subdomain = kEverywhere;
  std::optional<int> quad_degree;
};

/// A sum of integral terms over one mesh. The arity is the number of
/// distinct Argument numbers used by the integrands (0 = functional,
/// 1 = linear form, 2 = bilinear form); Argument 0 indexes test functions
/// (matrix rows), Argument 1 trial functions (columns).
class Form {
 public:
  Form() = default;
  Form(std::vector<IntegralTerm> terms, std::shared_ptr<const Mesh> mesh);

  const std::vector<IntegralTerm>& terms() const { return terms_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int arity() const { return arity_; }

  /// Space of Argument `number`, or nullptr if that Argument is unused.
  std::shared_ptr<const FunctionSpace> argument_space(int number) const;

 private:
  std::vector<IntegralTerm> terms_;
  std::shared_ptr<const Mesh> mesh_;
  int arity_ = 0;
};

/// Cell integral over the whole mesh (or one subdomain marker).
Form dx(Expr integrand, std::shared_ptr<const Mesh> mesh,
        int subdomain = kEverywhere, std::optional<int> quad_degree = {});

/// Exterior facet integral.
Form ds(Expr integrand, std::shared_ptr<const Mesh> mesh,
        int subdomain = kEverywhere, std::optional<int> quad_degree = {});

Form operator+(const Form& a, const Form& b);
Form operator-(const Form& a, const Form& b);
Form operator-(const Form& a);
Form operator*(double s, const Form& a);

/// Gateaux derivative of every integrand with respect to coefficient w in
/// the given direction (an Argument or a Coefficient of the same shape).
Form derivative(const Form& form, const Function& w, const Expr& direction);

/// Terminal substitutions for forms and expressions: coefficients by id,
/// arguments by number. Used to swap arguments and coefficients when
/// building Lagrangians and adjoint right-hand sides.
struct ReplacementMap {
  std::map<int, Expr> coefficients;  // Function id -> replacement
  std::map<int, Expr> arguments;     // Argument number -> replacement
};

Form replace(const Form& form, const ReplacementMap& map);

}  // namespace formgrad
