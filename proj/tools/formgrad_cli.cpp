// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: mesh inspection, the three example runners, the
// Taylor-test harness and the shape optimization loop. Exit codes:
// 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "formgrad/cases.hpp"
#include "formgrad/io.hpp"
#include "formgrad/shapeopt.hpp"

namespace fg = formgrad;

namespace {

struct CommonOptions {
  std::string mesh_path;
  std::string out_dir = ".";
  int threads = 1;
  std::optional<int> quad_degree;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_out) {
  cmd->add_option("--mesh", opts.mesh_path, "Mesh file (.msh or .json)")
      ->required();
  if (needs_out)
    cmd->add_option("--out", opts.out_dir, "Output directory (created)");
  cmd->add_option("--threads", opts.threads,
                  "Assembly threads (default 1, the reproducible mode)");
  cmd->add_option("--quad-degree", opts.quad_degree,
                  "Override the automatic quadrature degree");
}

std::shared_ptr<fg::Mesh> load_mesh(const CommonOptions& opts) {
  fg::set_default_assembly_threads(opts.threads);
  auto mesh = fg::read_mesh(opts.mesh_path);
  if (opts.out_dir != ".") std::filesystem::create_directories(opts.out_dir);
  return mesh;
}

fg::Form with_quad_degree(const fg::Form& form, std::optional<int> degree) {
  if (!degree) return form;
  std::vector<fg::IntegralTerm> terms;
  for (auto t : form.terms()) {
    t.quad_degree = degree;
    terms.push_back(std::move(t));
  }
  return fg::Form(std::move(terms), form.mesh_ptr());
}

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

int run_mesh_info(const CommonOptions& opts) {
  auto mesh = load_mesh(opts);
  std::printf("vertices: %d\n", mesh->num_vertices());
  std::printf("cells: %d\n", mesh->num_cells());
  std::printf("facets: %zu\n", mesh->exterior_facets().size());
  std::string markers;
  for (int m : mesh->boundary_markers())
    markers += (markers.empty() ? "" : " ") + std::to_string(m);
  std::printf("markers: %s\n", markers.c_str());
  std::printf("min_det: %s\n", fg::format_double(validate_mesh(*mesh)).c_str());
  return 0;
}

int run_example(int example, const CommonOptions& opts) {
  auto mesh = load_mesh(opts);
  fg::Form J;
  std::vector<double> dj;

  if (example == 1) {
    auto ex = fg::make_example1(mesh);
    J = with_quad_degree(ex.J, opts.quad_degree);
    dj = fg::assemble(fg::shape_derivative(J, 1)).vector;
  } else if (example == 2) {
    auto ex = fg::make_example2(mesh);
    J = with_quad_degree(ex.J, opts.quad_degree);
    dj = fg::assemble(fg::shape_derivative(J, 1)).vector;
  } else {
    auto ex = fg::make_example3(mesh);
    ex.solve_state();
    ex.solve_adjoint();
    J = with_quad_degree(ex.J, opts.quad_degree);
    // Constrained derivative through the saturated Lagrangian.
    dj = fg::assemble(
             fg::shape_derivative(with_quad_degree(ex.lagrangian,
                                                   opts.quad_degree), 1))
             .vector;
  }

  std::printf("J = %s\n", fg::format_double(fg::assemble_scalar(J)).c_str());
  const std::string csv = path_in(opts.out_dir, "dJ.csv");
  fg::write_csv_vector(csv, "dJ", dj);
  std::printf("wrote %s (%zu entries)\n", csv.c_str(), dj.size());
  return 0;
}

int run_taylor(int example, std::uint64_t seed, bool resolve,
               const CommonOptions& opts) {
  auto mesh = load_mesh(opts);
  fg::Function V = fg::random_vector_field(mesh, seed);
  fg::TaylorOptions topts;

  fg::TaylorReport report;
  if (example == 1) {
    auto ex = fg::make_example1(mesh);
    report = fg::taylor_test(with_quad_degree(ex.J, opts.quad_degree), *mesh, V,
                             topts);
  } else if (example == 2) {
    auto ex = fg::make_example2(mesh);
    report = fg::taylor_test(with_quad_degree(ex.J, opts.quad_degree), *mesh, V,
                             topts);
  } else {
    auto ex = fg::make_example3(mesh);
    ex.solve_state();
    ex.solve_adjoint();
    if (resolve) {
      // Reduced functional with re-solved states; first order only.
      topts.second_order = false;
      topts.resolve = [&ex] { ex.solve_state(); };
    }
    report = fg::taylor_test(
        with_quad_degree(ex.lagrangian, opts.quad_degree), *mesh, V, topts);
  }

  std::vector<std::vector<double>> rows;
  for (const auto& s : report.samples)
    rows.push_back({s.s, s.delta1, s.delta2, s.valid ? 1.0 : 0.0});
  const std::string csv = path_in(opts.out_dir, "taylor.csv");
  fg::write_csv_rows(csv, "s,delta1,delta2,valid", rows);

  std::printf("J = %s\n", fg::format_double(report.j0).c_str());
  std::printf("dJ[V] = %s\n", fg::format_double(report.dj).c_str());
  std::printf("slope1 = %s\n", fg::format_double(report.slope1).c_str());
  if (topts.second_order)
    std::printf("slope2 = %s\n", fg::format_double(report.slope2).c_str());
  std::printf("wrote %s\n", csv.c_str());

  const bool ok =
      report.slope1 >= 1.9 && (!topts.second_order || report.slope2 >= 2.9);
  if (!ok) std::fprintf(stderr, "taylor-test: slopes below expected rates\n");
  return ok ? 0 : 3;
}

int run_optimize(const CommonOptions& opts, int steps, double step_size,
                 double alpha, const std::vector<int>& fixed) {
  auto mesh = load_mesh(opts);
  auto ex = fg::make_example3(mesh);

  fg::OptimizeConfig config{mesh,  ex.residual, ex.J,      ex.u,  ex.p,
                            {},    fixed,       step_size, steps, alpha};

  std::vector<std::vector<double>> rows;
  const auto on_record = [&](const fg::OptRecord& rec, const fg::Mesh& m,
                             const fg::Function& u) {
    rows.push_back({static_cast<double>(rec.iteration), rec.objective,
                    rec.gradient_norm, rec.volume, rec.step});
    char name[32];
    std::snprintf(name, sizeof(name), "iter_%04d.vtk", rec.iteration);
    const std::vector<std::pair<std::string, const fg::Function*>> fields{
        {"u", &u}};
    fg::write_vtk(path_in(opts.out_dir, name), m, fields);
  };

  const auto history = fg::optimize(config, on_record);
  const std::string csv = path_in(opts.out_dir, "history.csv");
  fg::write_csv_rows(csv, "iter,J,gradnorm,volume,step", rows);

  const auto& first = history.records.front();
  const auto& last = history.records.back();
  std::printf("iterations: %zu\n", history.records.size() - 1);
  std::printf("objective: %s -> %s\n",
              fg::format_double(first.objective).c_str(),
              fg::format_double(last.objective).c_str());
  std::printf("gradient norm: %s -> %s\n",
              fg::format_double(first.gradient_norm).c_str(),
              fg::format_double(last.gradient_norm).c_str());
  std::printf("volume: %s -> %s\n", fg::format_double(first.volume).c_str(),
              fg::format_double(last.volume).c_str());
  std::printf("wrote %s\n", csv.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "formgrad: automated shape differentiation of finite element "
      "functionals on the reference element"};
  app.require_subcommand(1);

  CommonOptions info_opts, ex_opts, taylor_opts, opt_opts;

  auto* info = app.add_subcommand("mesh-info", "Report mesh statistics");
  add_common(info, info_opts, false);

  int example = 1;
  auto* run = app.add_subcommand(
      "run-example", "Assemble a built-in example functional and its "
                     "shape-derivative vector");
  run->add_option("example", example, "Example number (1, 2 or 3)")
      ->required()
      ->check(CLI::Range(1, 3));
  add_common(run, ex_opts, true);

  int taylor_example = 1;
  std::uint64_t seed = 42;
  bool resolve = false;
  auto* taylor = app.add_subcommand(
      "taylor-test", "Check first- and second-order Taylor remainder rates "
                     "for a random direction");
  taylor->add_option("--example", taylor_example, "Example number (1, 2 or 3)")
      ->check(CLI::Range(1, 3));
  taylor->add_option("--seed", seed, "Seed for the random direction");
  taylor->add_flag("--resolve", resolve,
                   "Example 3: re-solve the state on every moved mesh "
                   "(first-order check of the reduced functional)");
  add_common(taylor, taylor_opts, true);

  int steps = 100;
  double step_size = 0.01;
  double alpha = 10.0;
  std::vector<int> fixed{1, 2};
  auto* opt = app.add_subcommand(
      "optimize", "Descent loop on the PDE-constrained example with a "
                  "volume penalty (objective column is the penalized value)");
  opt->add_option("--steps", steps, "Number of iterations");
  opt->add_option("--step-size", step_size, "Fixed step size");
  opt->add_option("--alpha", alpha, "Volume penalty weight");
  opt->add_option("--fixed", fixed,
                  "Boundary markers held fixed by the smoother")
      ->delimiter(',');
  add_common(opt, opt_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // --help exits 0; parse failures are config errors
  }

  try {
    if (info->parsed()) return run_mesh_info(info_opts);
    if (run->parsed()) return run_example(example, ex_opts);
    if (taylor->parsed())
      return run_taylor(taylor_example, seed, resolve, taylor_opts);
    if (opt->parsed())
      return run_optimize(opt_opts, steps, step_size, alpha, fixed);
  } catch (const fg::IOError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const fg::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const fg::Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return 2;
}
