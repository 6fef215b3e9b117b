// SPDX-License-Identifier: Apache-2.0
//
// Direct sparse LU (supernodal, COLAMD column ordering, threshold partial
// pivoting with threshold 0.1) with plain and transposed solves.

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ldc/sparse_matrix.hpp"

namespace ldc {

class Factorization {
 public:
  /// Throws ErrorCode::Singular on a (numerically) singular pivot.
  explicit Factorization(const SparseMatrix& a);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;
  Factorization(const Factorization&) = delete;
  Factorization& operator=(const Factorization&) = delete;

  int size() const;

  /// Solves A x = rhs. Safe to call concurrently on one factorization.
  std::vector<double> solve(std::span<const double> rhs) const;
  /// Solves A^T x = rhs.
  std::vector<double> solve_transpose(std::span<const double> rhs) const;

  /// Dense factors with P A Q = L U. Only meant for verification on small
  /// matrices.
  struct DenseFactors {
    int n = 0;
    std::vector<double> l;  // row-major n x n
    std::vector<double> u;
    std::vector<int> row_perm;  // row k of P A is row row_perm[k] of A
    std::vector<int> col_perm;  // column k of A Q is column col_perm[k] of A
  };
  DenseFactors dense_factors() const;

  static const char* ordering_name();

 private:
  struct Impl;
  static std::vector<double> run_solve(const Impl& impl, bool transpose,
                                       std::span<const double> rhs);
  std::unique_ptr<Impl> impl_;
};

Factorization factorize(const SparseMatrix& a);

/// ‖A x − rhs‖₂ ≤ tol (‖A‖_max ‖x‖₂ + ‖rhs‖₂)
bool residual_within(const SparseMatrix& a, std::span<const double> x,
                     std::span<const double> rhs, bool transpose,
                     double tol = 1e-10);

}  // namespace ldc
