// SPDX-License-Identifier: Apache-2.0

#include "ldc/sparse_linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cassert>
#include <cmath>

#include "ldc/error.hpp"
#include "ldc/solver_stats.hpp"

namespace ldc {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using EigenLU = Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>>;

struct Factorization::Impl {
  SparseMatrix csr;
  EigenLU lu;
};

Factorization::Factorization(const SparseMatrix& a) : impl_(new Impl) {
  if (a.rows() != a.cols()) {
    fail(ErrorCode::SizeMismatch, "factorization needs a square matrix");
  }
  impl_->csr = a;
  const int n = a.rows();
  if (n == 0) return;
  // A CSR matrix is the CSC layout of its transpose.
  const Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>> view(
      n, n, static_cast<int>(a.nnz()), a.row_ptr().data(), a.col_idx().data(),
      a.values().data());
  const EigenSparse csc = view;
  impl_->lu.setPivotThreshold(0.1);
  impl_->lu.isSymmetric(false);
  impl_->lu.compute(csc);
  if (impl_->lu.info() != Eigen::Success) {
    fail(ErrorCode::Singular, "singular pivot: " + impl_->lu.lastErrorMessage());
  }
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

int Factorization::size() const { return impl_->csr.rows(); }

std::vector<double> Factorization::run_solve(const Impl& impl, bool transpose,
                                             std::span<const double> rhs) {
  const int n = impl.csr.rows();
  if (static_cast<int>(rhs.size()) != n) {
    fail(ErrorCode::SizeMismatch, "right-hand side length mismatch");
  }
  std::vector<double> x(n, 0.0);
  if (n == 0) return x;
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
  Eigen::Map<Eigen::VectorXd> out(x.data(), n);
  if (transpose) {
    // The transpose view only reads the factors.
    out = const_cast<EigenLU&>(impl.lu).transpose().solve(b);
  } else {
    out = impl.lu.solve(b);
  }
  for (double v : x) {
    if (!std::isfinite(v)) fail(ErrorCode::Singular, "solve produced non-finite values");
  }

  if (solver_stats::checking()) {
    const std::vector<double> ax =
        transpose ? impl.csr.multiply_transpose(x) : impl.csr.multiply(x);
    double r = 0.0;
    for (int i = 0; i < n; ++i) r += (ax[i] - rhs[i]) * (ax[i] - rhs[i]);
    const double scale = impl.csr.max_abs() * norm2(x) + norm2(rhs);
    const double rel = scale > 0.0 ? std::sqrt(r) / scale : 0.0;
    solver_stats::record_solve(rel);
    assert(rel <= 1e-10);
  }
  return x;
}

std::vector<double> Factorization::solve(std::span<const double> rhs) const {
  return run_solve(*impl_, false, rhs);
}

std::vector<double> Factorization::solve_transpose(
    std::span<const double> rhs) const {
  return run_solve(*impl_, true, rhs);
}

Factorization::DenseFactors Factorization::dense_factors() const {
  const int n = size();
  DenseFactors f;
  f.n = n;
  if (n == 0) return f;
  // The factors are only reachable through triangular solves: invert them
  // column by column and invert back densely.
  Eigen::MatrixXd linv = Eigen::MatrixXd::Identity(n, n);
  impl_->lu.matrixL().solveInPlace(linv);
  Eigen::MatrixXd uinv = Eigen::MatrixXd::Identity(n, n);
  impl_->lu.matrixU().solveInPlace(uinv);
  const Eigen::MatrixXd l = linv.inverse();
  const Eigen::MatrixXd u = uinv.inverse();
  f.l.resize(static_cast<std::size_t>(n) * n);
  f.u.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      f.l[i * n + j] = j <= i ? l(i, j) : 0.0;
      f.u[i * n + j] = j >= i ? u(i, j) : 0.0;
    }
  }
  // L U = Pr A Pcᵀ; Eigen's permutation moves index i to indices(i).
  const auto& pr = impl_->lu.rowsPermutation().indices();
  const auto& pc = impl_->lu.colsPermutation().indices();
  f.row_perm.resize(n);
  f.col_perm.resize(n);
  for (int i = 0; i < n; ++i) {
    f.row_perm[pr(i)] = i;
    f.col_perm[pc(i)] = i;
  }
  return f;
}

const char* Factorization::ordering_name() {
  return "supernodal sparse LU, COLAMD ordering, pivot threshold 0.1";
}

Factorization factorize(const SparseMatrix& a) { return Factorization(a); }

bool residual_within(const SparseMatrix& a, std::span<const double> x,
                     std::span<const double> rhs, bool transpose, double tol) {
  const std::vector<double> ax =
      transpose ? a.multiply_transpose(x) : a.multiply(x);
  double r = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    r += (ax[i] - rhs[i]) * (ax[i] - rhs[i]);
  }
  return std::sqrt(r) <= tol * (a.max_abs() * norm2(x) + norm2(rhs));
}

}  // namespace ldc
