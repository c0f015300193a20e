// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/quadrature.hpp"

#include <cmath>

#include "formgrad/errors.hpp"

namespace formgrad {

void gauss_legendre(int n, std::vector<double>& points,
                    std::vector<double>& weights) {
  // Nodes of P_n on [-1,1] by Newton iteration on the three-term
  // recurrence, then mapped to [0,1].
  points.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Re-evaluate the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map to [0,1]; nodes come out in descending x, store ascending.
    points[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (x + 1.0);
    weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
  }
}

namespace {

QuadratureRule interval_rule(int degree) {
  QuadratureRule rule;
  rule.cell = CellKind::Interval;
  rule.degree = degree;
  const int n = (degree + 2) / 2;  // 2n-1 >= degree
  std::vector<double> p, w;
  gauss_legendre(n, p, w);
  for (int i = 0; i < n; ++i) {
    rule.points.push_back({p[static_cast<std::size_t>(i)], 0.0});
    rule.weights.push_back(w[static_cast<std::size_t>(i)]);
  }
  return rule;
}

QuadratureRule triangle_rule(int degree) {
  QuadratureRule rule;
  rule.cell = CellKind::Triangle;
  rule.degree = degree;

  if (degree == 1) {
    rule.points = {{1.0 / 3.0, 1.0 / 3.0}};
    rule.weights = {0.5};
    return rule;
  }
  if (degree == 2) {
    rule.points = {{1.0 / 6.0, 1.0 / 6.0},
                   {2.0 / 3.0, 1.0 / 6.0},
                   {1.0 / 6.0, 2.0 / 3.0}};
    rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    return rule;
  }

  // Collapsed Gauss product rule on the square (a,b) -> (a(1-b), b):
  // int_T f = int_0^1 int_0^1 f(a(1-b), b) (1-b) da db. The (1-b) factor
  // raises the polynomial degree in b by one.
  const int na = (degree + 2) / 2;
  const int nb = (degree + 3) / 2;
  std::vector<double> pa, wa, pb, wb;
  gauss_legendre(na, pa, wa);
  gauss_legendre(nb, pb, wb);
  for (int j = 0; j < nb; ++j)
    for (int i = 0; i < na; ++i) {
      const double a = pa[static_cast<std::size_t>(i)];
      const double b = pb[static_cast<std::size_t>(j)];
      rule.points.push_back({a * (1.0 - b), b});
      rule.weights.push_back(wa[static_cast<std::size_t>(i)] *
                             wb[static_cast<std::size_t>(j)] * (1.0 - b));
    }
  return rule;
}

}  // namespace

QuadratureRule quadrature(CellKind cell, int degree) {
  if (degree < 1 || degree > 20)
    throw Error("quadrature: degree " + std::to_string(degree) +
                " outside [1, 20]");
  return cell == CellKind::Interval ? interval_rule(degree)
                                    : triangle_rule(degree);
}

}  // namespace formgrad
