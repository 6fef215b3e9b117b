// SPDX-License-Identifier: Apache-2.0

#include "ldc/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "ldc/error.hpp"

namespace ldc {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_ptr,
                           std::vector<int> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (rows_ < 0 || cols_ < 0 ||
      row_ptr_.size() != static_cast<std::size_t>(rows_) + 1 ||
      col_idx_.size() != values_.size() || row_ptr_.front() != 0 ||
      row_ptr_.back() != static_cast<int>(values_.size())) {
    fail(ErrorCode::InvalidArgument, "inconsistent CSR arrays");
  }
  for (int i = 0; i < rows_; ++i) {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_idx_[p] < 0 || col_idx_[p] >= cols_ ||
          (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])) {
        fail(ErrorCode::InvalidArgument, "CSR columns must increase strictly");
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  std::vector<int> row_ptr(rows + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  int last_row = -1;
  int last_col = -1;
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      fail(ErrorCode::InvalidArgument, "triplet outside matrix bounds");
    }
    if (t.row == last_row && t.col == last_col) {
      values.back() += t.value;
      continue;
    }
    col_idx.push_back(t.col);
    values.push_back(t.value);
    ++row_ptr[t.row + 1];
    last_row = t.row;
    last_col = t.col;
  }
  for (int i = 0; i < rows; ++i) row_ptr[i + 1] += row_ptr[i];
  return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx),
                      std::move(values));
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<int> row_ptr(n + 1);
  std::vector<int> col_idx(n);
  for (int i = 0; i <= n; ++i) row_ptr[i] = i;
  for (int i = 0; i < n; ++i) col_idx[i] = i;
  return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx),
                      std::vector<double>(n, 1.0));
}

double SparseMatrix::at(int i, int j) const {
  const auto first = col_idx_.begin() + row_ptr_[i];
  const auto last = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? values_[it - col_idx_.begin()] : 0.0;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != cols_) {
    fail(ErrorCode::SizeMismatch, "matvec size mismatch");
  }
  std::vector<double> y(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      sum += values_[p] * x[col_idx_[p]];
    }
    y[i] = sum;
  }
  return y;
}

std::vector<double> SparseMatrix::multiply_transpose(
    std::span<const double> x) const {
  if (static_cast<int>(x.size()) != rows_) {
    fail(ErrorCode::SizeMismatch, "transpose matvec size mismatch");
  }
  std::vector<double> y(cols_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      y[col_idx_[p]] += values_[p] * x[i];
    }
  }
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<int> row_ptr(cols_ + 1, 0);
  for (int c : col_idx_) ++row_ptr[c + 1];
  for (int j = 0; j < cols_; ++j) row_ptr[j + 1] += row_ptr[j];
  std::vector<int> next(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<int> col_idx(values_.size());
  std::vector<double> values(values_.size());
  for (int i = 0; i < rows_; ++i) {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const int q = next[col_idx_[p]]++;
      col_idx[q] = i;
      values[q] = values_[p];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(row_ptr), std::move(col_idx),
                      std::move(values));
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::SizeMismatch, "dot size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace ldc
