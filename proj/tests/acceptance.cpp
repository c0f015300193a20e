// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end verification suite. Each check prints one PASS/FAIL line; the
// exit code is the number of failed checks. Expected values are either
// analytic (worked integrals over the unit square), independent hand-coded
// derivative formulas, or properties of the method (rates, symmetry,
// determinism).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "formgrad/cases.hpp"
#include "formgrad/io.hpp"
#include "formgrad/quadrature.hpp"
#include "formgrad/shapeopt.hpp"
#include "formgrad/space.hpp"

namespace fg = formgrad;
using fg::Expr;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %s%s%s\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.empty() ? "" : ": ", detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double max_rel_diff(const std::vector<double>& a,
                    const std::vector<double>& b) {
  double scale = 1e-300;
  for (double v : a) scale = std::max(scale, std::abs(v));
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    out = std::max(out, std::abs(a[i] - b[i]) / scale);
  return out;
}

fg::Function polynomial_direction(const std::shared_ptr<fg::Mesh>& mesh,
                                  fg::SeededRng& rng) {
  const Expr x = fg::spatial_coordinate();
  const Expr x0 = fg::component(x, 0), x1 = fg::component(x, 1);
  const auto poly = [&] {
    return fg::constant(rng.symmetric()) + rng.symmetric() * x0 +
           rng.symmetric() * x1 + rng.symmetric() * x0 * x1 +
           rng.symmetric() * x0 * x0 + rng.symmetric() * x1 * x1;
  };
  fg::Function v(mesh->coordinate_space(), "V");
  fg::interpolate(fg::as_vector(poly(), poly()), v);
  return v;
}

// ---------------------------------------------------------------------------

void criterion_taylor_rates() {
  const auto t0 = std::chrono::steady_clock::now();

  auto mesh = fg::unit_square_mesh(16);
  auto ex1 = fg::make_example1(mesh);
  fg::Function v1 = fg::random_vector_field(mesh, 42);
  const auto r1 = fg::taylor_test(ex1.J, *mesh, v1);

  auto mesh3 = fg::unit_square_mesh(16);
  auto ex3 = fg::make_example3(mesh3);
  ex3.solve_state();
  ex3.solve_adjoint();
  fg::Function v3 = fg::random_vector_field(mesh3, 42);
  const auto r3 = fg::taylor_test(ex3.lagrangian, *mesh3, v3);

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const auto in = [](double s, double lo, double hi) {
    return s >= lo && s <= hi;
  };
  const bool pass = in(r1.slope1, 1.9, 2.5) && in(r1.slope2, 2.9, 3.6) &&
                    in(r3.slope1, 1.9, 2.5) && in(r3.slope2, 2.9, 3.6) &&
                    secs < 60.0;
  report("1 taylor-rates (examples 1 and 3, h=1/16, seed 42)", pass,
         "slopes ex1 (" + fmt(r1.slope1) + ", " + fmt(r1.slope2) + "), ex3 (" +
             fmt(r3.slope1) + ", " + fmt(r3.slope2) + "), " + fmt(secs) + "s");
}

void criterion_oracle_equivalence() {
  double worst = 0.0;
  for (int n : {4, 8, 16}) {
    auto mesh = fg::unit_square_mesh(n);
    const Expr x = fg::spatial_coordinate();
    const Expr V = fg::argument(0, mesh->coordinate_space());

    {  // Example 1: dJ[V] = int grad(u).V + u div(V), u = |x|^2 - 1.
      auto ex1 = fg::make_example1(mesh);
      const auto automatic = fg::assemble(fg::shape_derivative(ex1.J, 1));
      const Expr u = fg::inner(x, x) - 1.0;
      const fg::Form hand = fg::dx(fg::dot(2.0 * x, V) + u * fg::div(V), mesh);
      worst = std::max(worst,
                       max_rel_diff(automatic.vector, fg::assemble(hand).vector));
    }
    {  // Example 2: (v + |grad v|^2) div(V) - 2 grad(v).(DV^T grad(v)).
      auto ex2 = fg::make_example2(mesh);
      const auto automatic = fg::assemble(fg::shape_derivative(ex2.J, 1));
      const Expr v = fg::coefficient(ex2.v);
      const fg::Form hand = fg::dx(
          (v + fg::inner(fg::grad(v), fg::grad(v))) * fg::div(V) -
              2.0 * fg::dot(fg::grad(v),
                            fg::dot(fg::transpose(fg::grad(V)), fg::grad(v))),
          mesh);
      worst = std::max(worst,
                       max_rel_diff(automatic.vector, fg::assemble(hand).vector));
    }
    {  // Example 3: (u + grad u . grad p + u p - f p) div V - p grad f . V
      //             - grad u . (DV + DV^T) grad p.
      auto ex3 = fg::make_example3(mesh);
      ex3.solve_state();
      ex3.solve_adjoint();
      const auto automatic =
          fg::assemble(fg::shape_derivative(ex3.lagrangian, 1));
      const Expr u = fg::coefficient(ex3.u);
      const Expr p = fg::coefficient(ex3.p);
      const Expr f = ex3.f;
      const Expr grad_f =
          fg::as_vector(fg::component(x, 1), fg::component(x, 0));
      const Expr dv_sym = fg::grad(V) + fg::transpose(fg::grad(V));
      const fg::Form hand = fg::dx(
          (u + fg::inner(fg::grad(u), fg::grad(p)) + u * p - f * p) *
                  fg::div(V) -
              p * fg::dot(grad_f, V) -
              fg::dot(fg::grad(u), fg::dot(dv_sym, fg::grad(p))),
          mesh);
      worst = std::max(worst,
                       max_rel_diff(automatic.vector, fg::assemble(hand).vector));
    }
  }
  report("2 oracle-equivalence (hand-coded formulas, h=1/4,1/8,1/16)",
         worst <= 1e-10, "max relative entry difference " + fmt(worst));
}

void criterion_spot_values() {
  auto mesh = fg::unit_square_mesh(16);
  auto ex1 = fg::make_example1(mesh);

  const double j1 = fg::assemble_scalar(ex1.J);
  const bool j_ok = std::abs(j1 - (-1.0 / 3.0)) <= 1e-12;

  const auto dj = fg::assemble(fg::shape_derivative(ex1.J, 1));
  fg::Function dil(mesh->coordinate_space(), "dil");
  fg::interpolate(fg::spatial_coordinate(), dil);
  const double djv = fg::dot(dj.vector, dil.dofs());
  const bool dj_ok = std::abs(djv - 2.0 / 3.0) <= 1e-10;

  const auto dvol = fg::assemble(fg::shape_derivative(fg::volume_form(mesh), 1));
  fg::Function c(mesh->coordinate_space(), "c");
  fg::interpolate(fg::constant(fg::Vec2{0.8, -0.6}), c);
  const double dvc = fg::dot(dvol.vector, c.dofs());
  const bool dvol_ok = std::abs(dvc) <= 1e-12;

  report("3 analytic-spot-values (J1, dJ1[(x,y)], dVol[const])",
         j_ok && dj_ok && dvol_ok,
         "J1=" + fmt(j1) + ", dJ1=" + fmt(djv) + ", dVol=" + fmt(dvc));
}

void criterion_divergence_theorem() {
  auto mesh = fg::unit_square_mesh(16);
  const auto dvol = fg::assemble(fg::shape_derivative(fg::volume_form(mesh), 1));
  fg::SeededRng rng(42);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    fg::Function v = polynomial_direction(mesh, rng);
    const double interior = fg::dot(dvol.vector, v.dofs());
    const double flux = fg::assemble_scalar(
        fg::ds(fg::dot(fg::coefficient(v), fg::facet_normal()), mesh));
    worst = std::max(worst, std::abs(interior - flux) /
                                std::max(1.0, std::abs(interior)));
  }
  report("4 divergence-theorem (dVol[V] vs boundary flux, 5 seeded V)",
         worst <= 1e-10, "max deviation " + fmt(worst));
}

void criterion_second_derivative_symmetry() {
  fg::SeededRng rng(42);
  double worst = 0.0;
  for (int which : {1, 2}) {
    auto mesh = fg::unit_square_mesh(8);
    fg::Form J = which == 1 ? fg::make_example1(mesh).J
                            : fg::make_example2(mesh).J;
    for (int trial = 0; trial < 5; ++trial) {
      fg::Function v = polynomial_direction(mesh, rng);
      fg::Function w = polynomial_direction(mesh, rng);
      const std::vector<fg::Direction> vw{fg::Direction{v}, fg::Direction{w}};
      const std::vector<fg::Direction> wv{fg::Direction{w}, fg::Direction{v}};
      const double a = fg::assemble(fg::shape_derivative(J, vw)).scalar;
      const double b = fg::assemble(fg::shape_derivative(J, wv)).scalar;
      worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
    }
  }
  report("5 second-derivative-symmetry (examples 1 and 2, 5 seeded pairs)",
         worst <= 1e-10, "max scaled asymmetry " + fmt(worst));
}

void criterion_adjoint() {
  auto mesh = fg::unit_square_mesh(16);
  auto ex3 = fg::make_example3(mesh);
  ex3.solve_state();
  ex3.solve_adjoint();
  double perr = 0.0;
  for (double d : ex3.p.dofs()) perr = std::max(perr, std::abs(d + 1.0));

  fg::Function v = fg::random_vector_field(mesh, 42);
  fg::TaylorOptions opts;
  opts.second_order = false;
  opts.resolve = [&ex3] { ex3.solve_state(); };
  const auto rep = fg::taylor_test(ex3.lagrangian, *mesh, v, opts);

  report("6 adjoint-correctness (p = -1; re-solved FD slope)",
         perr <= 1e-8 && rep.slope1 >= 1.9,
         "max|p+1|=" + fmt(perr) + ", slope " + fmt(rep.slope1));
}

void criterion_optimization() {
  auto reg = fg::make_regression_case(fg::unit_square_mesh(16));
  fg::OptimizeConfig config{reg.mesh, reg.residual, reg.J,  reg.u, reg.p,
                            {},       {1, 2},       0.02,  50,    10.0};
  const auto history = fg::optimize(config);

  bool monotone = true;
  for (std::size_t k = 1; k < history.records.size(); ++k)
    monotone = monotone && history.records[k].objective <=
                               history.records[k - 1].objective + 1e-12;

  const double g0 = history.records.front().gradient_norm;
  const double gn = history.records.back().gradient_norm;
  report("7 optimization-regression (alpha=10, 50 steps of 0.02)",
         monotone && gn <= 0.1 * g0,
         std::string("objective ") +
             (monotone ? "non-increasing" : "INCREASED") + ", gradient " +
             fmt(g0) + " -> " + fmt(gn));
}

void criterion_quadrature_exactness() {
  // Same moment oracle as the unit suite: int x^p y^q = p! q! / (p+q+2)!.
  const auto moment = [](int p, int q) {
    double result = 1.0;
    for (int k = 1; k <= p + q + 2; ++k) result /= k;
    for (int k = 1; k <= p; ++k) result *= k;
    for (int k = 1; k <= q; ++k) result *= k;
    return result;
  };
  fg::SeededRng rng(42);
  double worst = 0.0;
  for (int d = 1; d <= 20; ++d) {
    const auto rule = fg::quadrature(fg::CellKind::Triangle, d);
    double numeric = 0.0, exact = 0.0;
    std::vector<double> coeff;
    for (int p = 0; p <= d; ++p)
      for (int q = 0; p + q <= d; ++q) coeff.push_back(rng.symmetric());
    for (int k = 0; k < rule.num_points(); ++k) {
      const double x = rule.points[static_cast<std::size_t>(k)][0];
      const double y = rule.points[static_cast<std::size_t>(k)][1];
      double val = 0.0;
      std::size_t idx = 0;
      for (int p = 0; p <= d; ++p)
        for (int q = 0; p + q <= d; ++q)
          val += coeff[idx++] * std::pow(x, p) * std::pow(y, q);
      numeric += rule.weights[static_cast<std::size_t>(k)] * val;
    }
    std::size_t idx = 0;
    for (int p = 0; p <= d; ++p)
      for (int q = 0; p + q <= d; ++q) exact += coeff[idx++] * moment(p, q);
    worst = std::max(worst, std::abs(numeric - exact));
  }
  report("8 quadrature-exactness (degrees 1..20 vs analytic moments)",
         worst <= 1e-13, "max absolute error " + fmt(worst));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing " + path + ">";
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void criterion_cli_determinism(const std::string& cli,
                               const std::string& meshes,
                               const std::string& out_dir) {
  namespace fs = std::filesystem;
  const std::string mesh = meshes + "/unit_square_h8.json";
  bool pass = true;
  std::string detail;

  struct Run {
    std::string name, args, artifact;
  };
  const std::vector<Run> runs{
      {"taylor", "taylor-test --example 1 --seed 42", "taylor.csv"},
      {"run-example", "run-example 3", "dJ.csv"},
      {"optimize", "optimize --steps 5 --step-size 0.02 --alpha 10 --fixed 1,2",
       "history.csv"},
  };
  for (const auto& run : runs) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      const std::string dir =
          out_dir + "/det_" + run.name + "_" + std::to_string(rep);
      fs::create_directories(dir);
      const std::string cmd = cli + " " + run.args + " --mesh " + mesh +
                              " --threads 1 --out " + dir + " > " + dir +
                              "/stdout.txt 2>&1";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) {
        pass = false;
        detail += run.name + " exited " + std::to_string(rc) + "; ";
        break;
      }
      const std::string content = slurp(dir + "/" + run.artifact);
      if (rep == 0)
        first = content;
      else if (content != first) {
        pass = false;
        detail += run.name + " output differs between runs; ";
      }
    }
  }
  report("9 cli-determinism (byte-identical CSV outputs, threads=1)", pass,
         detail.empty() ? "taylor-test, run-example, optimize" : detail);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"formgrad acceptance suite"};
  std::string cli = "formgrad";
  std::string meshes = "meshes";
  std::string out_dir = "acceptance_out";
  app.add_option("--cli", cli, "Path to the formgrad CLI binary");
  app.add_option("--meshes", meshes, "Directory with the mesh fixtures");
  app.add_option("--out", out_dir, "Scratch directory");
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out_dir);

  criterion_taylor_rates();
  criterion_oracle_equivalence();
  criterion_spot_values();
  criterion_divergence_theorem();
  criterion_second_derivative_symmetry();
  criterion_adjoint();
  criterion_optimization();
  criterion_quadrature_exactness();
  criterion_cli_determinism(cli, meshes, out_dir);

  if (g_failures == 0)
    std::printf("all acceptance checks passed\n");
  else
    std::printf("%d acceptance check(s) FAILED\n", g_failures);
  return g_failures;
}
