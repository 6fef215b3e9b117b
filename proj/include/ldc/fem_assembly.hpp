// SPDX-License-Identifier: Apache-2.0
//
// Linear-element assembly of
//   a(u, v) = ∫ (∇u·K∇v + (b·∇u) v + c u v),   b(u, v) = ∫ m u v
// for constant coefficients. Every element integral is evaluated in closed
// form, so assembly is exact up to rounding.

#pragma once

#include <array>
#include <span>
#include <vector>

#include "ldc/function.hpp"
#include "ldc/mesh.hpp"
#include "ldc/sparse_matrix.hpp"

namespace ldc {

struct ProblemCoeffs {
  /// Row-major 2x2 diffusion matrix a_ij.
  std::array<double, 4> diffusion{1.0, 0.0, 0.0, 1.0};
  std::array<double, 2> convection{0.0, 0.0};
  double reaction = 0.0;
  double weight = 1.0;

  static ProblemCoeffs convection_diffusion(double bx, double by) {
    ProblemCoeffs p;
    p.convection = {bx, by};
    return p;
  }

  /// Throws ErrorCode::Coefficient on loss of uniform ellipticity or a
  /// non-positive weight.
  void validate() const;
  /// a(u,v) = a(v,u) for all u, v.
  bool is_symmetric() const;
};

/// Exact a_T(u, v) on one triangle, u the trial and v the test function
/// given by their corner values.
double element_a(const std::array<Point, 3>& corners,
                 const std::array<double, 3>& u,
                 const std::array<double, 3>& v, const ProblemCoeffs& p);
double element_b(const std::array<Point, 3>& corners,
                 const std::array<double, 3>& u,
                 const std::array<double, 3>& v, const ProblemCoeffs& p);

/// A[k,l] = a(φ_l, φ_k) over all vertices (Dirichlet included).
SparseMatrix assemble_a_full(const Mesh& m, const ProblemCoeffs& p);
SparseMatrix assemble_b_full(const Mesh& m, const ProblemCoeffs& p);

/// Restriction of a vertex-indexed matrix to the unknowns of m.
SparseMatrix restrict_to_unknowns(const SparseMatrix& full, const Mesh& m);

SparseMatrix assemble_a(const Mesh& m, const ProblemCoeffs& p);
SparseMatrix assemble_b(const Mesh& m, const ProblemCoeffs& p);

/// Full and interior operators of one mesh, assembled once.
struct MeshOperators {
  MeshPtr mesh;
  SparseMatrix a_full;
  SparseMatrix b_full;
  SparseMatrix a;
  SparseMatrix b;
};

MeshOperators build_operators(MeshPtr mesh, const ProblemCoeffs& p);

/// F[k] = λ b(g, φ_k) − a(g, φ_k) for the unknowns of ops.mesh, where
/// `g_full` holds g at every vertex (including the Dirichlet ring). With
/// `adjoint` the form arguments are swapped: λ b(φ_k, g) − a(φ_k, g).
std::vector<double> defect_functional(const MeshOperators& ops,
                                      std::span<const double> g_full,
                                      double lambda, bool adjoint);

std::vector<double> assemble_functional(const MeshOperators& target,
                                        const CompositeFunction& g,
                                        double lambda);
std::vector<double> adjoint_functional(const MeshOperators& target,
                                       const CompositeFunction& g,
                                       double lambda);

}  // namespace ldc
