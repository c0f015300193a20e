// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "formgrad/types.hpp"

namespace formgrad {

enum class CellKind : std::uint8_t { Triangle, Interval };

/// Quadrature rule on the reference triangle or the unit interval.
/// Weights sum to the reference measure (1/2 for the triangle, 1 for the
/// interval) and the rule is exact for polynomials up to `degree`.
struct QuadratureRule {
  CellKind cell = CellKind::Triangle;
  int degree = 0;
  std::vector<Vec2> points;  // interval rules use the x component only
  std::vector<double> weights;

  int num_points() const { return static_cast<int>(points.size()); }
};

/// Rule of at least the requested polynomial exactness, 1 <= degree <= 20.
/// Triangles use tabulated symmetric rules for degrees 1-2 and collapsed
/// Gauss product rules above; intervals use Gauss-Legendre.
QuadratureRule quadrature(CellKind cell, int degree);

/// n-point Gauss-Legendre nodes/weights on [0,1] (exact to degree 2n-1).
void gauss_legendre(int n, std::vector<double>& points,
                    std::vector<double>& weights);

}  // namespace formgrad
