// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "formgrad/assemble.hpp"
#include "formgrad/form.hpp"

namespace formgrad {

enum class LinearMethod : std::uint8_t { Direct, ConjugateGradient };

struct LinearOptions {
  LinearMethod method = LinearMethod::Direct;
  double cg_tol = 1e-10;       // relative residual
  int cg_max_iter_factor = 10; // max iterations = factor * dimension
};

/// A system assembled with boundary conditions applied: constrained rows
/// are identity rows and the matching rhs entries carry the (lifted)
/// boundary values.
struct LinearSystem {
  CSRMatrix matrix;
  std::vector<double> rhs;
  std::vector<int> constrained;  // sorted constrained dof set
};

/// Solves A x = b. Direct: dense LU with partial pivoting (dimension
/// capped at 2*10^4); CG requires A symmetric positive definite on the
/// free dofs and uses Jacobi scaling. The returned solution satisfies
/// ||A x - b|| <= 1e-10 * max(1, ||b||) (direct) or the CG tolerance.
std::vector<double> solve_linear(const CSRMatrix& A, std::span<const double> b,
                                 const LinearOptions& options = {});

std::vector<double> solve_linear(const LinearSystem& system,
                                 const LinearOptions& options = {});

/// Assembles matrix and rhs forms into a ready-to-solve system with
/// symmetric Dirichlet elimination.
LinearSystem build_linear_system(const Form& bilinear, const Form& linear,
                                 std::span<const DirichletBC> bcs = {});

struct NewtonOptions {
  double tol = 1e-9;  // absolute residual 2-norm
  int max_iter = 20;
  LinearOptions linear{};
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_norms;
};

/// Newton's method for an arity-1 residual form in u. The Jacobian is the
/// Gateaux derivative of the residual with a trial Argument. Dirichlet
/// values are applied to u up front; increments are constrained to zero.
/// Throws NonConvergenceError with the iteration trace on failure.
NewtonReport newton_solve(const Form& residual, Function& u,
                          std::span<const DirichletBC> bcs = {},
                          const NewtonOptions& options = {});

/// Solves the adjoint equation of a scalar Lagrangian L(u, p): find p such
/// that the derivative of L with respect to u vanishes in every test
/// direction. The adjoint matrix is the u-Jacobian of the p-linear part,
/// transposed onto p by construction; BCs are the homogeneous versions of
/// the state conditions. p's dofs are overwritten.
void adjoint_solve(const Form& lagrangian, const Function& u, Function& p,
                   std::span<const DirichletBC> bcs = {},
                   const LinearOptions& options = {});

}  // namespace formgrad
