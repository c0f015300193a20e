// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/shapeopt.hpp"

#include <cmath>
#include <string>

#include "formgrad/cases.hpp"
#include "formgrad/pullback.hpp"
#include "formgrad/space.hpp"

namespace formgrad {

namespace {

/// Least-squares slope of log(delta) against log(s) over the asymptotic
/// range: the smallest `count` valid samples with delta above the floor.
double fit_slope(const std::vector<TaylorSample>& samples, bool second,
                 int count = 6, double floor = 1e-13) {
  std::vector<std::pair<double, double>> pts;  // (log s, log delta)
  // Samples are ordered by decreasing s; walk from the smallest.
  for (auto it = samples.rbegin(); it != samples.rend(); ++it) {
    if (!it->valid) continue;
    const double d = second ? it->delta2 : it->delta1;
    if (d <= floor) continue;
    pts.emplace_back(std::log(it->s), std::log(d));
    if (static_cast<int>(pts.size()) == count) break;
  }
  if (pts.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

Function random_vector_field(const std::shared_ptr<Mesh>& mesh,
                             std::uint64_t seed) {
  Function v(mesh->coordinate_space(), "V");
  SeededRng rng(seed);
  for (auto& d : v.dofs()) d = rng.symmetric();
  return v;
}

TaylorReport taylor_test(const Form& J, Mesh& mesh, const Function& V,
                         const TaylorOptions& options) {
  if (J.arity() != 0) throw Error("taylor_test: J must have arity 0");

  TaylorReport report;

  const auto dj_vec = assemble(shape_derivative(J, 1));
  report.dj = dot(dj_vec.vector, V.dofs());

  if (options.second_order) {
    const auto h = assemble(shape_derivative(J, 2));
    const auto hv = h.matrix.multiply(V.dofs());
    report.d2j = dot(V.dofs(), hv);
  }

  report.j0 = assemble_scalar(J);

  const auto checkpoint = mesh.save_coordinates();
  for (int k = 1; k <= options.num_steps; ++k) {
    TaylorSample sample;
    sample.s = std::pow(2.0, -k);
    move_mesh(mesh, V, sample.s);
    if (validate_mesh(mesh) <= 0.0) {
      sample.valid = false;  // dropped: the perturbed mesh is inverted
      report.samples.push_back(sample);
      mesh.restore_coordinates(checkpoint);
      continue;
    }
    if (options.resolve) options.resolve();
    const double js = assemble_scalar(J);
    mesh.restore_coordinates(checkpoint);

    const double linear = js - report.j0 - sample.s * report.dj;
    sample.delta1 = std::abs(linear);
    sample.delta2 = options.second_order
                        ? std::abs(linear - 0.5 * sample.s * sample.s * report.d2j)
                        : 0.0;
    report.samples.push_back(sample);
  }
  if (options.resolve) options.resolve();  // leave callers in the base state

  report.slope1 = fit_slope(report.samples, false);
  report.slope2 = options.second_order ? fit_slope(report.samples, true) : 0.0;
  return report;
}

RieszResult riesz_representative(const std::vector<double>& dj,
                                 const std::shared_ptr<Mesh>& mesh,
                                 const std::vector<int>& fixed_markers,
                                 const LinearOptions& options) {
  if (fixed_markers.empty())
    throw SingularMatrixError(
        "riesz_representative: no fixed markers; the pure Neumann Laplacian "
        "is singular (fix at least one boundary marker)");

  const auto space = mesh->coordinate_space();
  if (dj.size() != static_cast<std::size_t>(space->dim()))
    throw Error("riesz_representative: dJ length does not match the "
                "coordinate space");

  const Expr w = argument(0, space);
  const Expr v = argument(1, space);
  const Form laplace = dx(inner(grad(v), grad(w)), mesh);
  const std::vector<DirichletBC> bcs{DirichletBC::zero(space, fixed_markers)};

  const auto A = assemble(laplace, bcs);
  std::vector<double> rhs(dj.size());
  for (std::size_t i = 0; i < dj.size(); ++i) rhs[i] = -dj[i];
  const auto fixed = constrained_dofs(bcs);
  for (int d : fixed) rhs[static_cast<std::size_t>(d)] = 0.0;

  RieszResult out{Function(space, "riesz_direction"), 0.0};
  out.direction.dofs() = solve_linear(A.matrix, rhs, options);
  out.gradient_norm = std::sqrt(std::max(0.0, -dot(dj, out.direction.dofs())));
  return out;
}

OptHistory optimize(
    OptimizeConfig& config,
    const std::function<void(const OptRecord&, const Mesh&, const Function&)>&
        on_record) {
  if (!config.mesh) throw ConfigError("optimize: mesh is required");
  if (config.step_size <= 0.0)
    throw ConfigError("optimize: step size must be positive");
  if (config.iterations < 0)
    throw ConfigError("optimize: iterations must be non-negative");

  OptHistory history;
  const Form vol_form = volume_form(config.mesh);
  const double vol0 = assemble_scalar(vol_form);
  history.initial_volume = vol0;

  // Lagrangian: objective plus the residual tested with the adjoint.
  ReplacementMap test_to_p;
  test_to_p.arguments[0] = coefficient(config.p);
  const Form lagrangian = config.objective + replace(config.residual, test_to_p);

  double step = config.step_size;

  const auto solve_and_record = [&](int iteration,
                                    int rejections) -> OptRecord {
    newton_solve(config.residual, config.u, config.state_bcs);
    adjoint_solve(lagrangian, config.u, config.p, config.state_bcs);

    OptRecord rec;
    rec.iteration = iteration;
    rec.volume = assemble_scalar(vol_form);
    const double j = assemble_scalar(config.objective);
    rec.objective = j + config.alpha * (rec.volume - vol0) * (rec.volume - vol0);
    rec.step = step;
    rec.rejections = rejections;
    return rec;
  };

  OptRecord rec = solve_and_record(0, 0);

  for (int iter = 0;; ++iter) {
    // Shape derivative of the penalized objective:
    // dL + 2 alpha (vol - vol0) dVol.
    const auto dl = assemble(shape_derivative(lagrangian, 1));
    const auto dvol = assemble(shape_derivative(vol_form, 1));
    std::vector<double> g(dl.vector.size());
    const double pen = 2.0 * config.alpha * (rec.volume - vol0);
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = dl.vector[i] + pen * dvol.vector[i];

    auto riesz = riesz_representative(g, config.mesh, config.fixed_markers);
    rec.gradient_norm = riesz.gradient_norm;
    history.records.push_back(rec);
    if (on_record) on_record(rec, *config.mesh, config.u);

    if (iter == config.iterations) break;

    // Fixed-step update with rejection of inverting steps. The step size
    // halves on rejection and stays halved, so every rejection is visible
    // in the history's step column.
    int rejections = 0;
    for (;;) {
      move_mesh(*config.mesh, riesz.direction, step);
      if (validate_mesh(*config.mesh) > 0.0) break;
      move_mesh(*config.mesh, riesz.direction, -step);
      step *= 0.5;
      ++rejections;
      if (step < 1e-8)
        throw NonConvergenceError(
            "optimize: step size underflowed 1e-8 after repeated inverted-"
            "cell rejections at iteration " +
            std::to_string(iter + 1));
    }
    rec = solve_and_record(iter + 1, rejections);
  }
  return history;
}

}  // namespace formgrad
