// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace formgrad {

CSRMatrix CSRMatrix::from_pattern(int rows, int cols,
                                  std::vector<std::pair<int, int>> entries) {
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

  CSRMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
  for (const auto& [i, j] : entries) m.row_ptr_[static_cast<std::size_t>(i) + 1]++;
  for (int i = 0; i < rows; ++i)
    m.row_ptr_[static_cast<std::size_t>(i) + 1] +=
        m.row_ptr_[static_cast<std::size_t>(i)];
  m.col_idx_.reserve(entries.size());
  for (const auto& [i, j] : entries) m.col_idx_.push_back(j);
  m.values_.assign(entries.size(), 0.0);
  return m;
}

namespace {
int find_entry(const std::vector<int>& row_ptr, const std::vector<int>& col_idx,
               int i, int j) {
  const int lo = row_ptr[static_cast<std::size_t>(i)];
  const int hi = row_ptr[static_cast<std::size_t>(i) + 1];
  const auto begin = col_idx.begin() + lo;
  const auto end = col_idx.begin() + hi;
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return -1;
  return static_cast<int>(it - col_idx.begin());
}
}  // namespace

void CSRMatrix::add(int i, int j, double v) {
  const int k = find_entry(row_ptr_, col_idx_, i, j);
  if (k < 0)
    throw Error("CSRMatrix::add: entry (" + std::to_string(i) + "," +
                std::to_string(j) + ") outside the sparsity pattern");
  values_[static_cast<std::size_t>(k)] += v;
}

double CSRMatrix::get(int i, int j) const {
  const int k = find_entry(row_ptr_, col_idx_, i, j);
  return k < 0 ? 0.0 : values_[static_cast<std::size_t>(k)];
}

void CSRMatrix::zero_row(int i) {
  for (int k = row_ptr_[static_cast<std::size_t>(i)];
       k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
    values_[static_cast<std::size_t>(k)] = 0.0;
}

void CSRMatrix::zero_col(int j) {
  for (std::size_t k = 0; k < col_idx_.size(); ++k)
    if (col_idx_[k] == j) values_[k] = 0.0;
}

void CSRMatrix::set_diagonal(int i, double v) {
  const int k = find_entry(row_ptr_, col_idx_, i, i);
  if (k < 0)
    throw Error("CSRMatrix::set_diagonal: (" + std::to_string(i) + "," +
                std::to_string(i) + ") outside the sparsity pattern");
  values_[static_cast<std::size_t>(k)] = v;
}

std::vector<double> CSRMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[static_cast<std::size_t>(i)];
         k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
      s += values_[static_cast<std::size_t>(k)] *
           x[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

std::vector<std::vector<double>> CSRMatrix::to_dense() const {
  std::vector<std::vector<double>> d(
      static_cast<std::size_t>(rows_),
      std::vector<double>(static_cast<std::size_t>(cols_), 0.0));
  for (int i = 0; i < rows_; ++i)
    for (int k = row_ptr_[static_cast<std::size_t>(i)];
         k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
      d[static_cast<std::size_t>(i)]
       [static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(k)])] =
           values_[static_cast<std::size_t>(k)];
  return d;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace formgrad
