// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "formgrad/assemble.hpp"
#include "formgrad/cases.hpp"
#include "formgrad/quadrature.hpp"
#include "formgrad/space.hpp"

using namespace formgrad;

namespace {

/// Exact moment of the reference triangle: int x^p y^q = p! q! / (p+q+2)!.
double triangle_moment(int p, int q) {
  double result = 1.0;
  // p! q! / (p+q+2)! computed as a product of ratios to stay in range.
  for (int k = 1; k <= p + q + 2; ++k) result /= k;
  for (int k = 1; k <= p; ++k) result *= k;
  for (int k = 1; k <= q; ++k) result *= k;
  return result;
}

}  // namespace

TEST_CASE("triangle rules: spot values") {
  const auto r1 = quadrature(CellKind::Triangle, 1);
  REQUIRE(r1.num_points() == 1);
  CHECK(r1.points[0][0] == doctest::Approx(1.0 / 3.0));
  CHECK(r1.points[0][1] == doctest::Approx(1.0 / 3.0));
  CHECK(r1.weights[0] == doctest::Approx(0.5));

  const auto r2 = quadrature(CellKind::Triangle, 2);
  REQUIRE(r2.num_points() == 3);
  double xx = 0.0;
  for (int q = 0; q < 3; ++q)
    xx += r2.weights[static_cast<std::size_t>(q)] *
          r2.points[static_cast<std::size_t>(q)][0] *
          r2.points[static_cast<std::size_t>(q)][0];
  CHECK(xx == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("interval rules: Gauss-Legendre") {
  const auto r3 = quadrature(CellKind::Interval, 3);
  REQUIRE(r3.num_points() == 2);
  double t3 = 0.0;
  for (int q = 0; q < 2; ++q)
    t3 += r3.weights[static_cast<std::size_t>(q)] *
          std::pow(r3.points[static_cast<std::size_t>(q)][0], 3);
  CHECK(t3 == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("weights sum to the reference measure") {
  for (int d = 1; d <= 20; ++d) {
    const auto tri = quadrature(CellKind::Triangle, d);
    double s = 0.0;
    for (double w : tri.weights) s += w;
    CHECK(std::abs(s - 0.5) <= 1e-14);

    const auto iv = quadrature(CellKind::Interval, d);
    s = 0.0;
    for (double w : iv.weights) s += w;
    CHECK(std::abs(s - 1.0) <= 1e-14);
  }
}

TEST_CASE("quadrature exactness against analytic moments") {
  SeededRng rng(101);
  for (int d = 1; d <= 20; ++d) {
    const auto rule = quadrature(CellKind::Triangle, d);
    // Random polynomial of total degree d.
    std::vector<std::array<int, 2>> monomials;
    std::vector<double> coeffs;
    for (int p = 0; p <= d; ++p)
      for (int q = 0; p + q <= d; ++q) {
        monomials.push_back({p, q});
        coeffs.push_back(rng.symmetric());
      }
    double numeric = 0.0;
    for (int k = 0; k < rule.num_points(); ++k) {
      const double x = rule.points[static_cast<std::size_t>(k)][0];
      const double y = rule.points[static_cast<std::size_t>(k)][1];
      double val = 0.0;
      for (std::size_t m = 0; m < monomials.size(); ++m)
        val += coeffs[m] * std::pow(x, monomials[m][0]) *
               std::pow(y, monomials[m][1]);
      numeric += rule.weights[static_cast<std::size_t>(k)] * val;
    }
    double exact = 0.0;
    for (std::size_t m = 0; m < monomials.size(); ++m)
      exact += coeffs[m] * triangle_moment(monomials[m][0], monomials[m][1]);
    CHECK(std::abs(numeric - exact) <= 1e-13);
  }
  CHECK_THROWS_AS(quadrature(CellKind::Triangle, 0), Error);
  CHECK_THROWS_AS(quadrature(CellKind::Triangle, 21), Error);
}

TEST_CASE("assemble scalar spot values") {
  auto mesh = unit_square_mesh(4);
  CHECK(assemble_scalar(volume_form(mesh)) == doctest::Approx(1.0).epsilon(1e-15));

  const Expr x = spatial_coordinate();
  const Form J = dx(inner(x, x) - 1.0, mesh);
  CHECK(assemble_scalar(J) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("mass matrix row sums realize the partition of unity") {
  auto mesh = unit_square_mesh(3);
  auto space = FunctionSpace::create(mesh, 1, 1);
  const Form mass =
      dx(argument(0, space) * argument(1, space), mesh);
  const auto M = assemble(mass);

  // Row sums equal int b_i dx; the total is the area.
  const Form load = dx(argument(0, space), mesh);
  const auto b = assemble(load);
  double total = 0.0;
  for (int i = 0; i < space->dim(); ++i) {
    double row = 0.0;
    for (int k = M.matrix.row_ptr()[static_cast<std::size_t>(i)];
         k < M.matrix.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
      row += M.matrix.values()[static_cast<std::size_t>(k)];
    CHECK(row == doctest::Approx(b.vector[static_cast<std::size_t>(i)])
                     .epsilon(1e-13));
    total += row;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("assembly is linear in the form") {
  auto mesh = unit_square_mesh(3);
  auto space = FunctionSpace::create(mesh, 1, 1);
  Function u(space, "u");
  const Expr x = spatial_coordinate();
  interpolate(sin(component(x, 0)), u);

  const Form f1 = dx(coefficient(u) * coefficient(u), mesh);
  const Form f2 = dx(inner(grad(coefficient(u)), grad(coefficient(u))), mesh);
  const double a = 2.5, b = -1.25;

  CHECK(std::abs(assemble_scalar(a * f1 + b * f2) -
                 (a * assemble_scalar(f1) + b * assemble_scalar(f2))) <=
        1e-12);

  const Form l1 = dx(coefficient(u) * argument(0, space), mesh);
  const Form l2 = dx(inner(grad(coefficient(u)), grad(argument(0, space))),
                     mesh);
  const auto va = assemble(a * l1 + b * l2);
  const auto v1 = assemble(l1);
  const auto v2 = assemble(l2);
  for (std::size_t i = 0; i < va.vector.size(); ++i)
    CHECK(std::abs(va.vector[i] - (a * v1.vector[i] + b * v2.vector[i])) <=
          1e-12);
}

TEST_CASE("refinement convergence of a smooth integrand") {
  // int_0^1 int_0^1 sin(x) cos(y) = (1 - cos 1) sin 1.
  const double exact = (1.0 - std::cos(1.0)) * std::sin(1.0);
  const Expr x = spatial_coordinate();

  SUBCASE("closed form converges at the quadrature order") {
    double prev_err = 0.0;
    for (int n : {2, 4, 8}) {
      auto mesh = unit_square_mesh(n);
      const Form J = dx(sin(component(x, 0)) * cos(component(x, 1)), mesh);
      const double err = std::abs(assemble_scalar(J) - exact);
      if (n > 2) CHECK(err < 0.25 * prev_err);
      prev_err = err;
    }
    CHECK(prev_err <= 1e-9);
  }

  SUBCASE("P1 interpolant converges at second order") {
    double prev_err = 0.0;
    for (int n : {4, 8, 16}) {
      auto mesh = unit_square_mesh(n);
      auto space = FunctionSpace::create(mesh, 1, 1);
      Function v(space, "v");
      interpolate(sin(component(x, 0)) * cos(component(x, 1)), v);
      const double err =
          std::abs(assemble_scalar(dx(coefficient(v), mesh)) - exact);
      // Rate 2: the error contracts by about 4 per halving.
      if (n > 4) CHECK(err < 0.3 * prev_err);
      prev_err = err;
    }
  }
}

TEST_CASE("assembly is deterministic") {
  auto mesh = unit_square_mesh(4);
  auto space = FunctionSpace::create(mesh, 2, 1);
  Function u(space, "u");
  const Expr x = spatial_coordinate();
  interpolate(sin(component(x, 0)) + component(x, 1) * component(x, 1), u);

  const Form form = dx(
      coefficient(u) * argument(0, space) +
          inner(grad(coefficient(u)), grad(argument(0, space))),
      mesh);
  const auto a = assemble(form);
  const auto b = assemble(form);
  CHECK(a.vector == b.vector);  // bit-identical

  const double s1 = assemble_scalar(dx(coefficient(u) * coefficient(u), mesh));
  const double s2 = assemble_scalar(dx(coefficient(u) * coefficient(u), mesh));
  CHECK(s1 == s2);
}

TEST_CASE("threaded assembly matches within roundoff") {
  auto mesh = unit_square_mesh(8);
  auto space = FunctionSpace::create(mesh, 1, 1);
  Function u(space, "u");
  const Expr x = spatial_coordinate();
  interpolate(component(x, 0) * component(x, 1), u);

  const Form form =
      dx(coefficient(u) * argument(0, space), mesh);
  const auto serial = assemble(form);
  AssembleOptions opts;
  opts.threads = 4;
  const auto parallel = assemble(form, {}, opts);
  for (std::size_t i = 0; i < serial.vector.size(); ++i)
    CHECK(serial.vector[i] ==
          doctest::Approx(parallel.vector[i]).epsilon(1e-14));
}

TEST_CASE("dirichlet boundary conditions") {
  auto mesh = unit_square_mesh(4);
  auto space = FunctionSpace::create(mesh, 1, 1);

  SUBCASE("zero values zero the constrained dofs") {
    Function f(space, "f");
    for (auto& d : f.dofs()) d = 7.0;
    apply_bc_to_function(f, DirichletBC::zero(space, {1, 2, 3, 4}));
    const auto dofs = constrained_dofs(DirichletBC::zero(space, {1, 2, 3, 4}));
    for (int d : dofs) CHECK(f.dofs()[static_cast<std::size_t>(d)] == 0.0);
    CHECK(dofs.size() == 16);  // boundary vertices of the 4x4 square
  }

  SUBCASE("g = x interpolates node coordinates on the bottom edge") {
    Function f(space, "f");
    const DirichletBC bc{{3}, space, component(spatial_coordinate(), 0)};
    apply_bc_to_function(f, bc);
    const auto dofs = constrained_dofs(bc);
    for (int d : dofs)
      CHECK(f.dofs()[static_cast<std::size_t>(d)] ==
            doctest::Approx(mesh->vertex(d)[0]));
  }

  SUBCASE("unknown marker is an error") {
    Function f(space, "f");
    const DirichletBC bc{{99}, space, constant(0.0)};
    CHECK_THROWS_AS(apply_bc_to_function(f, bc), Error);
  }

  SUBCASE("vector-valued boundary values constrain both components") {
    Function V(mesh->coordinate_space(), "V");
    const Expr x = spatial_coordinate();
    const DirichletBC bc{{4}, mesh->coordinate_space(),
                         as_vector(component(x, 0), constant(-2.0))};
    apply_bc_to_function(V, bc);
    for (int d : constrained_dofs(bc)) {
      const int vertex = d / 2;
      const double expected = d % 2 == 0 ? mesh->vertex(vertex)[0] : -2.0;
      CHECK(V.dofs()[static_cast<std::size_t>(d)] ==
            doctest::Approx(expected));
    }
  }

  SUBCASE("rank-2 elimination leaves identity rows and columns") {
    const Form laplace = dx(
        inner(grad(argument(0, space)), grad(argument(1, space))), mesh);
    const std::vector<DirichletBC> bcs{DirichletBC::zero(space, {1})};
    const auto A = assemble(laplace, bcs);
    const auto fixed = constrained_dofs(bcs[0]);
    for (int d : fixed) {
      for (int k = A.matrix.row_ptr()[static_cast<std::size_t>(d)];
           k < A.matrix.row_ptr()[static_cast<std::size_t>(d) + 1]; ++k) {
        const int j = A.matrix.col_idx()[static_cast<std::size_t>(k)];
        CHECK(A.matrix.values()[static_cast<std::size_t>(k)] ==
              (j == d ? 1.0 : 0.0));
      }
      // Column is zeroed in the other rows.
      for (int i = 0; i < A.matrix.rows(); ++i)
        if (i != d) CHECK(A.matrix.get(i, d) == 0.0);
    }

    const Form load = dx(argument(0, space), mesh);
    const auto b = assemble(load, bcs);
    for (int d : fixed) CHECK(b.vector[static_cast<std::size_t>(d)] == 0.0);
  }
}

TEST_CASE("facet assembly: perimeter and marked subsets") {
  auto mesh = unit_square_mesh(4);
  const Form perimeter = ds(constant(1.0), mesh);
  CHECK(assemble_scalar(perimeter) == doctest::Approx(4.0).epsilon(1e-14));

  const Form left = ds(constant(1.0), mesh, 1);
  CHECK(assemble_scalar(left) == doctest::Approx(1.0).epsilon(1e-14));

  // int_{ds} x over the right edge (x = 1): equals 1.
  const Expr x = spatial_coordinate();
  CHECK(assemble_scalar(ds(component(x, 0), mesh, 2)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  // ... and over the bottom edge (y = 0): int_0^1 x dx = 1/2.
  CHECK(assemble_scalar(ds(component(x, 0), mesh, 3)) ==
        doctest::Approx(0.5).epsilon(1e-14));
}
