// SPDX-License-Identifier: Apache-2.0
//
// Smallest eigenpairs of the discrete primal and adjoint pencils, alignment
// of the adjoint eigenvector with the primal one, and the generalized
// Rayleigh quotient a(u, u*) / b(u, u*) over a composite partition.

#pragma once

#include <span>
#include <vector>

#include "ldc/fem_assembly.hpp"
#include "ldc/function.hpp"
#include "ldc/mesh.hpp"
#include "ldc/sparse_linalg.hpp"
#include "ldc/sparse_matrix.hpp"

namespace ldc {

struct EigenOptions {
  /// Converged when ‖A x − λ B x‖₂ ≤ tol ‖B x‖₂.
  double tol = 1e-10;
  /// Inverse iterations with the fixed shift 0 before switching to a
  /// Rayleigh-quotient shift.
  int max_fixed_iterations = 200;
  int max_shifted_iterations = 30;
};

struct EigenPair {
  double lambda = 0.0;
  std::vector<double> vector;  // B-normalized: xᵀ B x = 1
  double residual = 0.0;       // ‖A x − λ B x‖₂ / ‖B x‖₂
  int iterations = 0;
};

/// Smallest eigenvalue of A x = λ B x by shift-invert iteration.
EigenPair solve_smallest(const SparseMatrix& a, const SparseMatrix& b,
                         const EigenOptions& opts = {});
/// Same, reusing a factorization of A (shift 0).
EigenPair solve_smallest(const Factorization& lu, const SparseMatrix& a,
                         const SparseMatrix& b, const EigenOptions& opts = {});

/// Left eigenpair: Aᵀ x = λ B x. `lambda_hint` is the primal eigenvalue the
/// result must agree with.
EigenPair solve_adjoint_smallest(const SparseMatrix& a, const SparseMatrix& b,
                                 double lambda_hint,
                                 const EigenOptions& opts = {});
EigenPair solve_adjoint_smallest(const Factorization& lu, const SparseMatrix& a,
                                 const SparseMatrix& b, double lambda_hint,
                                 const EigenOptions& opts = {});

/// L2(B)-orthogonal projection of u onto span(basis), normalized, with the
/// sign chosen so that b(u, result) > 0.
FeFunction adjoint_align(const FeFunction& u, std::span<const FeFunction> basis,
                         const SparseMatrix& b);

/// Exact a(u, u*) / b(u, u*) summed over the cells of the partition.
double rayleigh_quotient(const CompositeFunction& u,
                         const CompositeFunction& u_star,
                         const CompositePartition& partition,
                         const ProblemCoeffs& p);

struct EigenResult {
  double lambda = 0.0;
  double lambda_adjoint = 0.0;
  FeFunction u;       // ‖u‖₀ = 1
  FeFunction u_star;  // ‖u*‖₀ = 1, b(u, u*) > 0
  double pairing = 0.0;
  double residual = 0.0;
  double adjoint_residual = 0.0;
  int multiplicity = 1;
};

/// Primal and adjoint smallest eigenpairs on one mesh. With `symmetric` the
/// adjoint solve is skipped and u* = u.
EigenResult solve_eigenproblem(const MeshOperators& ops, const EigenOptions& opts,
                               bool symmetric);

}  // namespace ldc
