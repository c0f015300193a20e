// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/form.hpp"

#include <set>

#include "formgrad/derivative.hpp"
#include "formgrad/space.hpp"

namespace formgrad {

namespace {

void collect_argument_numbers(const Expr& e, std::set<int>& numbers) {
  if (e->kind() == ExprKind::Argument) numbers.insert(e->int_payload());
  for (const auto& c : e->children()) collect_argument_numbers(c, numbers);
}

void check_mesh_consistency(const Expr& e, const Mesh* mesh) {
  if (e->kind() == ExprKind::Coefficient) {
    if (&e->coefficient()->space().mesh() != mesh)
      throw Error("Form: coefficient '" + e->coefficient()->name() +
                  "' lives on a different mesh");
  }
  if (e->kind() == ExprKind::Argument) {
    if (&e->argument_space()->mesh() != mesh)
      throw Error("Form: argument lives on a different mesh");
  }
  for (const auto& c : e->children()) check_mesh_consistency(c, mesh);
}

}  // namespace

Form::Form(std::vector<IntegralTerm> terms, std::shared_ptr<const Mesh> mesh)
    : terms_(std::move(terms)), mesh_(std::move(mesh)) {
  if (!mesh_) throw Error("Form: mesh is required");
  std::set<int> numbers;
  for (const auto& t : terms_) {
    if (t.integrand->shape() != ValueShape::Scalar)
      throw ShapeError("Form: integrand must be scalar, got " +
                       to_string(t.integrand->shape()));
    collect_argument_numbers(t.integrand, numbers);
    check_mesh_consistency(t.integrand, mesh_.get());
  }
  arity_ = static_cast<int>(numbers.size());
  for (int n : numbers)
    if (n < 0 || n >= arity_)
      throw Error("Form: argument numbers must be contiguous from 0");
}

std::shared_ptr<const FunctionSpace> Form::argument_space(int number) const {
  for (const auto& t : terms_)
    if (auto s = argument_space_of(t.integrand, number)) return s;
  return nullptr;
}

Form dx(Expr integrand, std::shared_ptr<const Mesh> mesh, int subdomain,
        std::optional<int> quad_degree) {
  return Form({{std::move(integrand), Measure::Cell, subdomain, quad_degree}},
              std::move(mesh));
}

Form ds(Expr integrand, std::shared_ptr<const Mesh> mesh, int subdomain,
        std::optional<int> quad_degree) {
  return Form(
      {{std::move(integrand), Measure::ExteriorFacet, subdomain, quad_degree}},
      std::move(mesh));
}

Form operator+(const Form& a, const Form& b) {
  if (a.terms().empty()) return b;
  if (b.terms().empty()) return a;
  if (a.mesh_ptr().get() != b.mesh_ptr().get())
    throw Error("Form sum: meshes differ");
  auto terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return Form(std::move(terms), a.mesh_ptr());
}

Form operator-(const Form& a) { return -1.0 * a; }

Form operator-(const Form& a, const Form& b) { return a + (-b); }

Form operator*(double s, const Form& a) {
  std::vector<IntegralTerm> terms;
  terms.reserve(a.terms().size());
  for (const auto& t : a.terms())
    terms.push_back({constant(s) * t.integrand, t.measure, t.subdomain,
                     t.quad_degree});
  return Form(std::move(terms), a.mesh_ptr());
}

Form derivative(const Form& form, const Function& w, const Expr& direction) {
  std::vector<IntegralTerm> terms;
  terms.reserve(form.terms().size());
  for (const auto& t : form.terms())
    terms.push_back({gateaux_derivative(t.integrand, w, direction), t.measure,
                     t.subdomain, t.quad_degree});
  return Form(std::move(terms), form.mesh_ptr());
}

Form replace(const Form& form, const ReplacementMap& map) {
  std::vector<IntegralTerm> terms;
  terms.reserve(form.terms().size());
  for (const auto& t : form.terms())
    terms.push_back(
        {replace(t.integrand, map), t.measure, t.subdomain, t.quad_degree});
  return Form(std::move(terms), form.mesh_ptr());
}

}  // namespace formgrad
