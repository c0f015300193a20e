// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "formgrad/errors.hpp"

namespace formgrad {

/// Compressed-row sparse matrix with a fixed sparsity pattern. Column
/// indices are sorted within each row; insertion targets existing entries
/// only.
class CSRMatrix {
 public:
  CSRMatrix() = default;

  /// Builds the pattern from (row, col) pairs; duplicates are merged.
  static CSRMatrix from_pattern(int rows, int cols,
                                std::vector<std::pair<int, int>> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int num_nonzeros() const { return static_cast<int>(values_.size()); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Adds into an existing entry; throws if (i,j) is outside the pattern.
  void add(int i, int j, double v);

  /// Value at (i,j); zero outside the pattern.
  double get(int i, int j) const;

  void zero_row(int i);
  void zero_col(int j);
  void set_diagonal(int i, double v);

  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<std::vector<double>> to_dense() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// Result of assembling a form: a scalar, a dense vector, or a sparse
/// matrix depending on the form's arity.
struct AssembledTensor {
  int rank = 0;
  double scalar = 0.0;
  std::vector<double> vector;
  CSRMatrix matrix;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace formgrad
