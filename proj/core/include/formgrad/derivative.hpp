// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formgrad/expr.hpp"
#include "formgrad/form.hpp"

namespace formgrad {

/// Gateaux directional derivative of e with respect to coefficient w in the
/// given direction. The direction must be an Argument or a Coefficient with
/// the value shape of w.
///
/// Matrix rules: d det(A)[H] = det(A) tr(A^-1 H),
/// d A^-1 [H] = -A^-1 H A^-1. d|a|[h] = sign(a) h with sign(0) = 0, so the
/// derivative of |det DF| is total; on valid meshes det DF > 0 and the kink
/// is never hit.
///
/// The result is the raw rule application followed by zero pruning
/// (simplify_zeros); no other simplification is performed.
Expr gateaux_derivative(const Expr& e, const Function& w,
                        const Expr& direction);

/// Zero/identity pruning: 0*a -> 0, a+0 -> a, 1*a -> a, contractions with a
/// zero operand collapse to zero, pow(a,0) -> 1, pow(a,1) -> a. Structural
/// only; no value folding beyond recognizing literal zeros and ones.
Expr simplify_zeros(const Expr& e);

/// Terminal substitution; see ReplacementMap. Replacing the operand of
/// RefValue/RefGrad requires the replacement to be another terminal or a
/// constant (RefValue of a constant folds to the constant, RefGrad to zero).
Expr replace(const Expr& e, const ReplacementMap& map);

/// Polynomial-degree estimate of an integrand, clamped to [1, 20]:
/// product = sum of degrees, sum = max, grad lowers by one (floored at 0),
/// det/inverse of a degree-0 operand stay 0 (affine-cell Jacobians),
/// pow(a,k) = k*deg(a), and the non-polynomial nodes sin/cos/sqrt/abs add 2
/// to their operand degree. Coefficients and Arguments contribute their
/// space degree; the spatial coordinate has degree 1.
int estimate_quadrature_degree(const Expr& e);

}  // namespace formgrad
