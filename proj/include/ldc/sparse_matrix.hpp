// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace ldc {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix with strictly increasing column indices in
/// every row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<int> row_ptr,
               std::vector<int> col_idx, std::vector<double> values);

  /// Duplicate entries are summed.
  static SparseMatrix from_triplets(int rows, int cols,
                                    std::vector<Triplet> triplets);
  static SparseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  double at(int i, int j) const;

  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> multiply_transpose(std::span<const double> x) const;
  SparseMatrix transpose() const;
  double max_abs() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace ldc
