// SPDX-License-Identifier: Apache-2.0

#include "ldc/fem_assembly.hpp"

#include <cmath>

#include "ldc/error.hpp"

namespace ldc {

namespace {

struct Gradients {
  double area;
  std::array<double, 3> gx;
  std::array<double, 3> gy;
};

Gradients gradients(const std::array<Point, 3>& c) {
  const double area = signed_area(c[0], c[1], c[2]);
  const double inv = 1.0 / (2.0 * area);
  Gradients g{area, {}, {}};
  for (int i = 0; i < 3; ++i) {
    const Point& p = c[(i + 1) % 3];
    const Point& q = c[(i + 2) % 3];
    g.gx[i] = (p.y - q.y) * inv;
    g.gy[i] = (q.x - p.x) * inv;
  }
  return g;
}

std::array<Point, 3> corners_of(const Mesh& m, int t) {
  const auto& tri = m.triangles()[t];
  return {m.vertices()[tri[0]], m.vertices()[tri[1]], m.vertices()[tri[2]]};
}

template <class ElementMatrix>
SparseMatrix assemble_full(const Mesh& m, ElementMatrix&& element) {
  const int n = static_cast<int>(m.num_vertices());
  std::vector<Triplet> triplets;
  triplets.reserve(9 * m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles()[t];
    const auto e = element(corners_of(m, static_cast<int>(t)));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        triplets.push_back({tri[i], tri[j], e[i][j]});
      }
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(triplets));
}

using Element = std::array<std::array<double, 3>, 3>;

}  // namespace

void ProblemCoeffs::validate() const {
  // Smallest eigenvalue of the symmetric part of the diffusion matrix.
  const double a11 = diffusion[0];
  const double a22 = diffusion[3];
  const double off = 0.5 * (diffusion[1] + diffusion[2]);
  const double mean = 0.5 * (a11 + a22);
  const double radius = std::hypot(0.5 * (a11 - a22), off);
  if (!(mean - radius > 0.0)) {
    fail(ErrorCode::Coefficient, "diffusion matrix is not uniformly elliptic");
  }
  if (!(weight > 0.0)) fail(ErrorCode::Coefficient, "weight must be positive");
  for (double v : {convection[0], convection[1], reaction}) {
    if (!std::isfinite(v)) fail(ErrorCode::Coefficient, "non-finite coefficient");
  }
}

bool ProblemCoeffs::is_symmetric() const {
  return convection[0] == 0.0 && convection[1] == 0.0 &&
         diffusion[1] == diffusion[2];
}

double element_a(const std::array<Point, 3>& corners,
                 const std::array<double, 3>& u,
                 const std::array<double, 3>& v, const ProblemCoeffs& p) {
  const Gradients g = gradients(corners);
  double ux = 0, uy = 0, vx = 0, vy = 0;
  for (int i = 0; i < 3; ++i) {
    ux += u[i] * g.gx[i];
    uy += u[i] * g.gy[i];
    vx += v[i] * g.gx[i];
    vy += v[i] * g.gy[i];
  }
  const auto& k = p.diffusion;
  const double diffusion =
      ux * (k[0] * vx + k[1] * vy) + uy * (k[2] * vx + k[3] * vy);
  const double v_mean = (v[0] + v[1] + v[2]) / 3.0;
  const double convection = (p.convection[0] * ux + p.convection[1] * uy) * v_mean;
  const double su = u[0] + u[1] + u[2];
  const double sv = v[0] + v[1] + v[2];
  const double mass = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + su * sv) / 12.0;
  return g.area * (diffusion + convection + p.reaction * mass);
}

double element_b(const std::array<Point, 3>& corners,
                 const std::array<double, 3>& u,
                 const std::array<double, 3>& v, const ProblemCoeffs& p) {
  const double area = signed_area(corners[0], corners[1], corners[2]);
  const double su = u[0] + u[1] + u[2];
  const double sv = v[0] + v[1] + v[2];
  return p.weight * area *
         (u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + su * sv) / 12.0;
}

SparseMatrix assemble_a_full(const Mesh& m, const ProblemCoeffs& p) {
  p.validate();
  const auto& k = p.diffusion;
  return assemble_full(m, [&](const std::array<Point, 3>& c) {
    const Gradients g = gradients(c);
    Element e{};
    // Row i is the test function, column j the trial function.
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double diffusion = g.gx[j] * (k[0] * g.gx[i] + k[1] * g.gy[i]) +
                                 g.gy[j] * (k[2] * g.gx[i] + k[3] * g.gy[i]);
        const double convection =
            (p.convection[0] * g.gx[j] + p.convection[1] * g.gy[j]) / 3.0;
        const double mass = (i == j ? 2.0 : 1.0) / 12.0;
        e[i][j] = g.area * (diffusion + convection + p.reaction * mass);
      }
    }
    return e;
  });
}

SparseMatrix assemble_b_full(const Mesh& m, const ProblemCoeffs& p) {
  p.validate();
  return assemble_full(m, [&](const std::array<Point, 3>& c) {
    const double area = signed_area(c[0], c[1], c[2]);
    Element e{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        e[i][j] = p.weight * area * (i == j ? 2.0 : 1.0) / 12.0;
      }
    }
    return e;
  });
}

SparseMatrix restrict_to_unknowns(const SparseMatrix& full, const Mesh& m) {
  if (full.rows() != static_cast<int>(m.num_vertices()) ||
      full.cols() != full.rows()) {
    fail(ErrorCode::SizeMismatch, "matrix does not match mesh vertices");
  }
  const int n = m.num_unknowns();
  std::vector<int> row_ptr(n + 1, 0);
  std::vector<int> col_idx;
  std::vector<double> values;
  const auto rp = full.row_ptr();
  const auto ci = full.col_idx();
  const auto va = full.values();
  // Unknowns are numbered in vertex order, so column order is preserved.
  for (int k = 0; k < n; ++k) {
    const int v = m.unknown_vertices()[k];
    for (int q = rp[v]; q < rp[v + 1]; ++q) {
      const int dof = m.dof(ci[q]);
      if (dof < 0) continue;
      col_idx.push_back(dof);
      values.push_back(va[q]);
    }
    row_ptr[k + 1] = static_cast<int>(col_idx.size());
  }
  return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx),
                      std::move(values));
}

SparseMatrix assemble_a(const Mesh& m, const ProblemCoeffs& p) {
  return restrict_to_unknowns(assemble_a_full(m, p), m);
}

SparseMatrix assemble_b(const Mesh& m, const ProblemCoeffs& p) {
  return restrict_to_unknowns(assemble_b_full(m, p), m);
}

MeshOperators build_operators(MeshPtr mesh, const ProblemCoeffs& p) {
  MeshOperators ops;
  ops.a_full = assemble_a_full(*mesh, p);
  ops.b_full = assemble_b_full(*mesh, p);
  ops.a = restrict_to_unknowns(ops.a_full, *mesh);
  ops.b = restrict_to_unknowns(ops.b_full, *mesh);
  ops.mesh = std::move(mesh);
  return ops;
}

std::vector<double> defect_functional(const MeshOperators& ops,
                                      std::span<const double> g_full,
                                      double lambda, bool adjoint) {
  const Mesh& m = *ops.mesh;
  if (g_full.size() != m.num_vertices()) {
    fail(ErrorCode::SizeMismatch, "functional data must cover every vertex");
  }
  const std::vector<double> ag =
      adjoint ? ops.a_full.multiply_transpose(g_full) : ops.a_full.multiply(g_full);
  const std::vector<double> bg = ops.b_full.multiply(g_full);
  std::vector<double> f(m.num_unknowns());
  for (int k = 0; k < m.num_unknowns(); ++k) {
    const int v = m.unknown_vertices()[k];
    f[k] = lambda * bg[v] - ag[v];
  }
  return f;
}

std::vector<double> assemble_functional(const MeshOperators& target,
                                        const CompositeFunction& g,
                                        double lambda) {
  return defect_functional(target, g.values_on(*target.mesh), lambda, false);
}

std::vector<double> adjoint_functional(const MeshOperators& target,
                                       const CompositeFunction& g,
                                       double lambda) {
  return defect_functional(target, g.values_on(*target.mesh), lambda, true);
}

}  // namespace ldc
