// SPDX-License-Identifier: Apache-2.0

#include "ldc/eigen_solver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <sstream>

#include "ldc/error.hpp"

namespace ldc {

namespace {

double b_dot(const SparseMatrix& b, std::span<const double> x,
             std::span<const double> y) {
  return dot(x, b.multiply(y));
}

// Scales x to xᵀBx = 1 with a positive component sum.
void normalize(const SparseMatrix& b, std::vector<double>& x) {
  const double nrm = std::sqrt(b_dot(b, x, x));
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    fail(ErrorCode::UnsupportedSpectrum, "iteration vector collapsed");
  }
  double sum = 0.0;
  for (double v : x) sum += v;
  const double s = (sum < 0.0 ? -1.0 : 1.0) / nrm;
  for (double& v : x) v *= s;
}

struct Estimate {
  double lambda;
  double residual;
};

Estimate estimate(const SparseMatrix& a, const SparseMatrix& b,
                  std::span<const double> x, bool transpose) {
  const std::vector<double> ax =
      transpose ? a.multiply_transpose(x) : a.multiply(x);
  const std::vector<double> bx = b.multiply(x);
  const double lambda = dot(x, ax) / dot(x, bx);
  double r = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double d = ax[i] - lambda * bx[i];
    r += d * d;
  }
  return {lambda, std::sqrt(r) / norm2(bx)};
}

SparseMatrix shifted(const SparseMatrix& a, const SparseMatrix& b, double sigma) {
  std::vector<Triplet> t;
  t.reserve(a.nnz() + b.nnz());
  for (const SparseMatrix* m : {&a, &b}) {
    const double f = m == &a ? 1.0 : -sigma;
    for (int i = 0; i < m->rows(); ++i) {
      for (int q = m->row_ptr()[i]; q < m->row_ptr()[i + 1]; ++q) {
        t.push_back({i, m->col_idx()[q], f * m->values()[q]});
      }
    }
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

// Inverse iteration x ← (A − σB)⁻¹ B x (transposed operator when
// `transpose`). Returns nothing if `max_it` steps do not reach `tol`; x then
// holds the last iterate.
std::optional<EigenPair> iterate(const Factorization& lu, const SparseMatrix& a,
                                 const SparseMatrix& b, std::vector<double>& x,
                                 bool transpose, double tol, int max_it) {
  for (int it = 1; it <= max_it; ++it) {
    const std::vector<double> bx = b.multiply(x);
    x = transpose ? lu.solve_transpose(bx) : lu.solve(bx);
    normalize(b, x);
    const Estimate e = estimate(a, b, x, transpose);
    if (!std::isfinite(e.lambda)) break;
    if (e.residual <= tol) {
      return EigenPair{e.lambda, x, e.residual, it};
    }
  }
  return std::nullopt;
}

EigenPair smallest(const Factorization& lu, const SparseMatrix& a,
                   const SparseMatrix& b, bool transpose,
                   const EigenOptions& opts) {
  const int n = a.rows();
  if (n == 0 || a.cols() != n || b.rows() != n || b.cols() != n) {
    fail(ErrorCode::SizeMismatch, "eigenproblem needs square matrices of one size");
  }
  if (lu.size() != n) fail(ErrorCode::SizeMismatch, "factorization size mismatch");

  std::vector<double> x(n, 1.0);
  normalize(b, x);
  if (auto r = iterate(lu, a, b, x, transpose, opts.tol, opts.max_fixed_iterations)) {
    return *std::move(r);
  }

  // The fixed shift stalled: restart from the current Rayleigh quotient.
  std::vector<double> y = x;
  const double sigma = estimate(a, b, y, transpose).lambda;
  std::optional<Factorization> shifted_lu;
  try {
    shifted_lu.emplace(shifted(a, b, sigma));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Singular) throw;
    // σ is an eigenvalue to working precision; y is its eigenvector.
    const Estimate est = estimate(a, b, y, transpose);
    if (est.residual <= opts.tol) {
      return EigenPair{est.lambda, std::move(y), est.residual,
                       opts.max_fixed_iterations};
    }
    fail(ErrorCode::Shift, "shifted operator is singular");
  }
  if (auto r = iterate(*shifted_lu, a, b, y, transpose, opts.tol,
                       opts.max_shifted_iterations)) {
    r->iterations += opts.max_fixed_iterations;
    return *std::move(r);
  }
  fail(ErrorCode::UnsupportedSpectrum,
       "inverse iteration does not converge; the smallest eigenvalue is "
       "not real and simple");
}

Factorization factorize_at_zero(const SparseMatrix& a) {
  try {
    return Factorization(a);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Singular) {
      fail(ErrorCode::Shift, std::string("operator singular at shift 0: ") + e.what());
    }
    throw;
  }
}

}  // namespace

EigenPair solve_smallest(const SparseMatrix& a, const SparseMatrix& b,
                         const EigenOptions& opts) {
  return solve_smallest(factorize_at_zero(a), a, b, opts);
}

EigenPair solve_smallest(const Factorization& lu, const SparseMatrix& a,
                         const SparseMatrix& b, const EigenOptions& opts) {
  return smallest(lu, a, b, false, opts);
}

EigenPair solve_adjoint_smallest(const SparseMatrix& a, const SparseMatrix& b,
                                 double lambda_hint, const EigenOptions& opts) {
  return solve_adjoint_smallest(factorize_at_zero(a), a, b, lambda_hint, opts);
}

EigenPair solve_adjoint_smallest(const Factorization& lu, const SparseMatrix& a,
                                 const SparseMatrix& b, double lambda_hint,
                                 const EigenOptions& opts) {
  EigenPair p = smallest(lu, a, b, true, opts);
  if (std::abs(p.lambda - lambda_hint) > 1e-8 * std::abs(lambda_hint)) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "adjoint eigenvalue " << p.lambda << " differs from primal "
        << lambda_hint;
    fail(ErrorCode::UnsupportedSpectrum, msg.str());
  }
  return p;
}

FeFunction adjoint_align(const FeFunction& u, std::span<const FeFunction> basis,
                         const SparseMatrix& b) {
  const int m0 = static_cast<int>(basis.size());
  if (m0 == 0) fail(ErrorCode::InvalidArgument, "empty adjoint basis");
  const std::vector<double> uu = u.unknowns();
  if (b.rows() != static_cast<int>(uu.size())) {
    fail(ErrorCode::SizeMismatch, "mass matrix does not match u");
  }
  std::vector<std::vector<double>> phi;
  for (const FeFunction& f : basis) {
    if (f.mesh_ptr() != u.mesh_ptr()) {
      fail(ErrorCode::SizeMismatch, "adjoint basis lives on another mesh");
    }
    phi.push_back(f.unknowns());
  }
  Eigen::MatrixXd gram(m0, m0);
  Eigen::VectorXd rhs(m0);
  for (int j = 0; j < m0; ++j) {
    const std::vector<double> bphi = b.multiply(phi[j]);
    rhs(j) = dot(uu, bphi);
    for (int i = 0; i < m0; ++i) gram(i, j) = dot(phi[i], bphi);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
  if (qr.rank() < m0) fail(ErrorCode::DegeneratePairing, "singular Gram matrix");
  const Eigen::VectorXd alpha = qr.solve(rhs);

  std::vector<double> w(uu.size(), 0.0);
  for (int i = 0; i < m0; ++i) {
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += alpha(i) * phi[i][k];
  }
  const double nrm = std::sqrt(b_dot(b, w, w));
  if (!(nrm >= 1e-10)) {
    fail(ErrorCode::DegeneratePairing,
         "u is orthogonal to the adjoint eigenspace");
  }
  const double s = (b_dot(b, uu, w) < 0.0 ? -1.0 : 1.0) / nrm;
  for (double& v : w) v *= s;
  return FeFunction::from_unknowns(u.mesh_ptr(), w);
}

double rayleigh_quotient(const CompositeFunction& u,
                         const CompositeFunction& u_star,
                         const CompositePartition& partition,
                         const ProblemCoeffs& p) {
  double num = 0.0, den = 0.0, uu = 0.0, ss = 0.0;
  for (const PartitionCell& c : partition.cells()) {
    const auto cu = u.cell_values(c);
    const auto cs = u_star.cell_values(c);
    num += element_a(c.corners, cu, cs, p);
    den += element_b(c.corners, cu, cs, p);
    uu += element_b(c.corners, cu, cu, p);
    ss += element_b(c.corners, cs, cs, p);
  }
  if (!(std::abs(den) > 1e-10 * std::sqrt(uu * ss))) {
    fail(ErrorCode::DegeneratePairing, "b(u, u*) vanishes");
  }
  return num / den;
}

EigenResult solve_eigenproblem(const MeshOperators& ops, const EigenOptions& opts,
                               bool symmetric) {
  const Factorization lu = factorize_at_zero(ops.a);
  EigenPair primal = solve_smallest(lu, ops.a, ops.b, opts);
  EigenResult r;
  r.lambda = primal.lambda;
  r.residual = primal.residual;
  r.u = FeFunction::from_unknowns(ops.mesh, primal.vector);
  if (symmetric) {
    r.lambda_adjoint = r.lambda;
    r.adjoint_residual = r.residual;
    r.u_star = r.u;
  } else {
    EigenPair adj = solve_adjoint_smallest(lu, ops.a, ops.b, primal.lambda, opts);
    r.lambda_adjoint = adj.lambda;
    r.adjoint_residual = adj.residual;
    const FeFunction phi = FeFunction::from_unknowns(ops.mesh, adj.vector);
    r.u_star = adjoint_align(r.u, std::span(&phi, 1), ops.b);
  }
  r.pairing = b_dot(ops.b, r.u.unknowns(), r.u_star.unknowns());
  return r;
}

}  // namespace ldc
