// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/solve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "formgrad/derivative.hpp"
#include "formgrad/space.hpp"

namespace formgrad {

namespace {

constexpr int kDenseBudget = 20000;

std::vector<double> solve_dense_lu(const CSRMatrix& A,
                                   std::span<const double> b) {
  const int n = A.rows();
  if (n != A.cols()) throw Error("solve_linear: matrix is not square");
  if (n > kDenseBudget)
    throw Error("solve_linear: dimension " + std::to_string(n) +
                " exceeds the dense factorization budget (" +
                std::to_string(kDenseBudget) + "); use CG");

  auto dense = A.to_dense();
  std::vector<double> x(b.begin(), b.end());
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;

  double max_abs = 0.0;
  for (const auto& row : dense)
    for (double v : row) max_abs = std::max(max_abs, std::abs(v));

  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(dense[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)]);
    for (int i = k + 1; i < n; ++i) {
      const double v =
          std::abs(dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= 1e-14 * std::max(1.0, max_abs))
      throw SingularMatrixError("solve_linear: zero pivot at column " +
                                std::to_string(k));
    if (piv != k) {
      std::swap(dense[static_cast<std::size_t>(k)],
                dense[static_cast<std::size_t>(piv)]);
      std::swap(x[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(piv)]);
    }
    const double d = dense[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
    for (int i = k + 1; i < n; ++i) {
      const double f =
          dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] / d;
      if (f == 0.0) continue;
      dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = 0.0;
      for (int j = k + 1; j < n; ++j)
        dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
            f * dense[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      x[static_cast<std::size_t>(i)] -= f * x[static_cast<std::size_t>(k)];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j)
      s -= dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
           x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(i)] =
        s / dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
  }
  return x;
}

std::vector<double> solve_cg(const CSRMatrix& A, std::span<const double> b,
                             const LinearOptions& options) {
  const int n = A.rows();
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  std::vector<double> r(b.begin(), b.end());
  // Jacobi scaling.
  std::vector<double> di(static_cast<std::size_t>(n), 1.0);
  for (int i = 0; i < n; ++i) {
    const double d = A.get(i, i);
    if (d <= 0.0)
      throw SingularMatrixError(
          "solve_linear (CG): non-positive diagonal at row " +
          std::to_string(i));
    di[static_cast<std::size_t>(i)] = 1.0 / d;
  }
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    z[static_cast<std::size_t>(i)] =
        di[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
  std::vector<double> p = z;
  double rz = dot(r, z);
  const double bnorm = std::max(norm2(b), 1e-300);
  const int max_iter = options.cg_max_iter_factor * std::max(1, n);
  for (int iter = 0; iter < max_iter; ++iter) {
    if (norm2(r) / bnorm <= options.cg_tol) return x;
    const auto Ap = A.multiply(p);
    const double pAp = dot(p, Ap);
    if (pAp <= 0.0)
      throw SingularMatrixError(
          "solve_linear (CG): matrix is not positive definite");
    const double alpha = rz / pAp;
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] += alpha * p[static_cast<std::size_t>(i)];
      r[static_cast<std::size_t>(i)] -= alpha * Ap[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < n; ++i)
      z[static_cast<std::size_t>(i)] =
          di[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i)
      p[static_cast<std::size_t>(i)] =
          z[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
  }
  if (norm2(r) / bnorm <= options.cg_tol) return x;
  throw NonConvergenceError("solve_linear (CG): no convergence after " +
                            std::to_string(max_iter) + " iterations, rel res " +
                            std::to_string(norm2(r) / bnorm));
}

}  // namespace

std::vector<double> solve_linear(const CSRMatrix& A, std::span<const double> b,
                                 const LinearOptions& options) {
  if (A.rows() != static_cast<int>(b.size()))
    throw Error("solve_linear: dimension mismatch");
  std::vector<double> x = options.method == LinearMethod::Direct
                              ? solve_dense_lu(A, b)
                              : solve_cg(A, b, options);
  // Residual contract check.
  const auto Ax = A.multiply(x);
  double rn = 0.0;
  for (std::size_t i = 0; i < Ax.size(); ++i) {
    const double d = Ax[i] - b[i];
    rn += d * d;
  }
  rn = std::sqrt(rn);
  const double tol = options.method == LinearMethod::Direct ? 1e-10
                                                            : options.cg_tol;
  if (rn > tol * std::max(1.0, norm2(b)))
    throw SingularMatrixError(
        "solve_linear: residual " + std::to_string(rn) +
        " exceeds the tolerance (matrix is singular or ill-conditioned)");
  return x;
}

std::vector<double> solve_linear(const LinearSystem& system,
                                 const LinearOptions& options) {
  for (int d : system.constrained) {
    if (system.matrix.get(d, d) != 1.0)
      throw Error("solve_linear: constrained row " + std::to_string(d) +
                  " is not an identity row");
  }
  return solve_linear(system.matrix, system.rhs, options);
}

LinearSystem build_linear_system(const Form& bilinear, const Form& linear,
                                 std::span<const DirichletBC> bcs) {
  if (bilinear.arity() != 2 || linear.arity() != 1)
    throw Error("build_linear_system: expected arity-2 and arity-1 forms");
  LinearSystem out;
  out.matrix = assemble(bilinear, bcs).matrix;
  out.rhs = assemble(linear, bcs).vector;
  out.constrained = constrained_dofs(bcs);
  return out;
}

NewtonReport newton_solve(const Form& residual, Function& u,
                          std::span<const DirichletBC> bcs,
                          const NewtonOptions& options) {
  if (residual.arity() != 1)
    throw Error("newton_solve: residual form must have arity 1");

  for (const auto& bc : bcs) apply_bc_to_function(u, bc);

  const Form jacobian =
      derivative(residual, u, argument(1, u.space_ptr()));
  if (jacobian.arity() != 2)
    throw SingularMatrixError(
        "newton_solve: the residual does not depend on u, the Jacobian is "
        "identically zero");

  NewtonReport report;
  for (int iter = 0; iter <= options.max_iter; ++iter) {
    const auto r = assemble(residual, bcs);
    const double rnorm = norm2(r.vector);
    report.residual_norms.push_back(rnorm);
    if (rnorm <= options.tol) {
      report.iterations = iter;
      return report;
    }
    if (iter == options.max_iter) break;

    const auto J = assemble(jacobian, bcs);
    std::vector<double> rhs(r.vector.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -r.vector[i];
    const auto delta = solve_linear(J.matrix, rhs, options.linear);
    auto& dofs = u.dofs();
    for (std::size_t i = 0; i < dofs.size(); ++i) dofs[i] += delta[i];
  }

  std::string trace;
  for (double v : report.residual_norms)
    trace += (trace.empty() ? "" : ", ") + std::to_string(v);
  throw NonConvergenceError("newton_solve: no convergence after " +
                            std::to_string(options.max_iter) +
                            " iterations; residual norms: " + trace);
}

void adjoint_solve(const Form& lagrangian, const Function& u, Function& p,
                   std::span<const DirichletBC> bcs,
                   const LinearOptions& options) {
  if (lagrangian.arity() != 0)
    throw Error("adjoint_solve: lagrangian must have arity 0");
  if (!u.space().same_space(p.space()))
    throw Error("adjoint_solve: state and adjoint spaces differ");

  // dL/du in a test direction; affine in p since the constraint part is
  // linear in the multiplier.
  const Form dldu = derivative(lagrangian, u, argument(0, u.space_ptr()));

  // Matrix: the p-linear part of dL/du, with p as trial function. This is
  // the transpose of the Newton Jacobian of the residual at u.
  const Form adjoint_matrix_form =
      derivative(dldu, p, argument(1, p.space_ptr()));

  // Right-hand side: dL/du with p set to zero (the pure dJ/du part)...
  ReplacementMap zero_p;
  zero_p.coefficients[p.id()] = zero_expr(p.space().value_shape());
  const Form rhs_form = replace(dldu, zero_p);

  // Homogeneous versions of the state conditions constrain the adjoint.
  std::vector<DirichletBC> adjoint_bcs;
  adjoint_bcs.reserve(bcs.size());
  for (const auto& bc : bcs)
    adjoint_bcs.push_back(DirichletBC::zero(bc.space, bc.markers));

  const auto A = assemble(adjoint_matrix_form, adjoint_bcs);
  const auto b = assemble(rhs_form, adjoint_bcs);
  std::vector<double> rhs(b.vector.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -b.vector[i];
  p.dofs() = solve_linear(A.matrix, rhs, options);
}

}  // namespace formgrad
