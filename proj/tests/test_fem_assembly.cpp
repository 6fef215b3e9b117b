// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ldc/eigen_solver.hpp"
#include "ldc/error.hpp"
#include "ldc/fem_assembly.hpp"
#include "ldc/function.hpp"
#include "ldc/mesh.hpp"

using namespace ldc;

namespace {

// Independent closed forms for P1 elements with constant data.
std::array<double, 2> gradient(const std::array<Point, 3>& c, const std::array<double, 3>& u) {
  const double det = (c[1].x - c[0].x) * (c[2].y - c[0].y) - (c[2].x - c[0].x) * (c[1].y - c[0].y);
  const double du1 = u[1] - u[0], du2 = u[2] - u[0];
  return {(du1 * (c[2].y - c[0].y) - du2 * (c[1].y - c[0].y)) / det,
          (du2 * (c[1].x - c[0].x) - du1 * (c[2].x - c[0].x)) / det};
}

double oracle_a(const std::array<Point, 3>& c, const std::array<double, 3>& u,
                const std::array<double, 3>& v, double bx, double by) {
  const double area = std::abs(signed_area(c[0], c[1], c[2]));
  const auto gu = gradient(c, u);
  const auto gv = gradient(c, v);
  const double mean_v = (v[0] + v[1] + v[2]) / 3.0;
  return area * (gu[0] * gv[0] + gu[1] * gv[1]) + area * (bx * gu[0] + by * gu[1]) * mean_v;
}

double oracle_b(const std::array<Point, 3>& c, const std::array<double, 3>& u,
                const std::array<double, 3>& v) {
  const double area = std::abs(signed_area(c[0], c[1], c[2]));
  double uv = 0.0;
  for (int i = 0; i < 3; ++i) uv += u[i] * v[i];
  return area / 12.0 * (uv + (u[0] + u[1] + u[2]) * (v[0] + v[1] + v[2]));
}

std::vector<double> random_vector(std::size_t n, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = d(rng);
  return x;
}

Eigen::MatrixXd dense(const SparseMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) d(i, a.col_idx()[k]) = a.values()[k];
  }
  return d;
}

FeFunction random_function(const MeshPtr& m, std::mt19937& rng) {
  return FeFunction::from_unknowns(m, random_vector(m->num_unknowns(), rng));
}

}  // namespace

TEST_CASE("signed area helper matches the oracle orientation") {
  CHECK(signed_area({0, 0}, {1, 0}, {0, 1}) == doctest::Approx(0.5));
}

TEST_CASE("mass matrix of the unit right triangle") {
  const std::array<Point, 3> c{Point{0, 0}, Point{1, 0}, Point{0, 1}};
  const ProblemCoeffs p;
  for (int i = 0; i < 3; ++i) {
    std::array<double, 3> e{};
    e[i] = 1.0;
    CHECK(element_b(c, e, e, p) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  }
}

TEST_CASE("element forms agree with independent closed forms") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::array<Point, 3> c{Point{d(rng), d(rng)}, Point{d(rng), d(rng)}, Point{d(rng), d(rng)}};
    if (signed_area(c[0], c[1], c[2]) < 0) std::swap(c[1], c[2]);
    if (std::abs(signed_area(c[0], c[1], c[2])) < 1e-3) continue;
    const std::array<double, 3> u{d(rng), d(rng), d(rng)}, v{d(rng), d(rng), d(rng)};
    const double bx = 3 * d(rng), by = 3 * d(rng);
    const ProblemCoeffs p = ProblemCoeffs::convection_diffusion(bx, by);
    const double a_ref = oracle_a(c, u, v, bx, by);
    const double b_ref = oracle_b(c, u, v);
    CHECK(std::abs(element_a(c, u, v, p) - a_ref) <= 1e-12 * (1.0 + std::abs(a_ref)));
    CHECK(std::abs(element_b(c, u, v, p) - b_ref) <= 1e-12 * (1.0 + std::abs(b_ref)));
  }
}

TEST_CASE("assembled forms equal element sums") {
  std::mt19937 rng(11);
  const MeshPtr m = build_mesh(DomainSpec::lshape(), 4);
  const ProblemCoeffs p = ProblemCoeffs::convection_diffusion(0.0, 3.0);
  const SparseMatrix a = assemble_a(*m, p);
  const SparseMatrix b = assemble_b(*m, p);
  for (int trial = 0; trial < 5; ++trial) {
    const FeFunction u = random_function(m, rng), v = random_function(m, rng);
    double a_ref = 0.0, b_ref = 0.0;
    for (const auto& t : m->triangles()) {
      const std::array<Point, 3> c{m->vertices()[t[0]], m->vertices()[t[1]], m->vertices()[t[2]]};
      const std::array<double, 3> uu{u.values()[t[0]], u.values()[t[1]], u.values()[t[2]]};
      const std::array<double, 3> vv{v.values()[t[0]], v.values()[t[1]], v.values()[t[2]]};
      a_ref += oracle_a(c, uu, vv, 0.0, 3.0);
      b_ref += oracle_b(c, uu, vv);
    }
    const auto ux = u.unknowns(), vx = v.unknowns();
    CHECK(std::abs(dot(vx, a.multiply(ux)) - a_ref) <= 1e-12 * std::abs(a_ref));
    CHECK(std::abs(dot(vx, b.multiply(ux)) - b_ref) <= 1e-12 * std::abs(b_ref));
  }
}

TEST_CASE("convection part is skew-symmetric") {
  for (const DomainSpec& d : {DomainSpec::lshape(), DomainSpec::slit()}) {
    const MeshPtr m = build_mesh(d, 8);
    const Eigen::MatrixXd a0 = dense(assemble_a(*m, ProblemCoeffs{}));
    for (auto [bx, by] : {std::pair{0.0, 3.0}, {1.0, 1.0}, {0.0, 10.0}}) {
      const Eigen::MatrixXd c =
          dense(assemble_a(*m, ProblemCoeffs::convection_diffusion(bx, by))) - a0;
      CHECK((c + c.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(c.cwiseAbs().maxCoeff() > 1e-2);
    }
  }
}

TEST_CASE("pure Laplacian is symmetric positive definite") {
  const MeshPtr m = build_mesh(DomainSpec::lshape(), 4);
  const Eigen::MatrixXd a = dense(assemble_a(*m, ProblemCoeffs{}));
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("mass matrix is symmetric positive definite and integrates one") {
  for (const DomainSpec& d : {DomainSpec::lshape(), DomainSpec::slit()}) {
    const MeshPtr m = build_mesh(d, 4);
    const Eigen::MatrixXd b = dense(assemble_b(*m, ProblemCoeffs{}));
    REQUIRE(b.rows() <= 200);
    CHECK((b - b.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b).eigenvalues().minCoeff() > 0.0);
    const SparseMatrix full = assemble_b_full(*m, ProblemCoeffs{});
    double sum = 0.0;
    for (double v : full.values()) sum += v;
    CHECK(sum == doctest::Approx(d.area()).epsilon(1e-13));
  }
}

TEST_CASE("constants are annihilated away from the boundary") {
  const MeshPtr m = build_mesh(DomainSpec::lshape(), 8);
  const SparseMatrix a = assemble_a(*m, ProblemCoeffs::convection_diffusion(1.0, 1.0));
  const std::vector<double> ones(m->num_unknowns(), 1.0);
  const std::vector<double> r = a.multiply(ones);
  const SparseMatrix full = assemble_a_full(*m, ProblemCoeffs{});
  int interior = 0;
  for (int k = 0; k < m->num_unknowns(); ++k) {
    const int v = m->unknown_vertices()[k];
    bool touches_boundary = false;
    for (int e = full.row_ptr()[v]; e < full.row_ptr()[v + 1]; ++e) {
      touches_boundary |= m->is_dirichlet(full.col_idx()[e]);
    }
    if (touches_boundary) continue;
    ++interior;
    CHECK(std::abs(r[k]) <= 1e-12);
  }
  CHECK(interior > 0);
}

TEST_CASE("coercivity surrogate on random vectors") {
  std::mt19937 rng(3);
  const MeshPtr m = build_mesh(DomainSpec::slit(), 4);
  const SparseMatrix a = assemble_a(*m, ProblemCoeffs::convection_diffusion(0.0, 10.0));
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_vector(m->num_unknowns(), rng);
    CHECK(dot(x, a.multiply(x)) > 0.0);
  }
}

TEST_CASE("coefficient validation") {
  ProblemCoeffs p;
  p.diffusion = {1.0, 0.0, 0.0, -1.0};
  CHECK_THROWS_AS(p.validate(), Error);
  try {
    assemble_a(*build_mesh(DomainSpec::square(), 2), p);
    FAIL("indefinite diffusion accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Coefficient);
  }
  ProblemCoeffs q;
  q.weight = 0.0;
  CHECK_THROWS_AS(q.validate(), Error);
  CHECK(ProblemCoeffs{}.is_symmetric());
  CHECK_FALSE(ProblemCoeffs::convection_diffusion(0.0, 3.0).is_symmetric());
}

TEST_CASE("defect of a discrete eigenpair vanishes") {
  const MeshPtr m = build_mesh(DomainSpec::lshape(), 8);
  for (bool symmetric : {true, false}) {
    const ProblemCoeffs p =
        symmetric ? ProblemCoeffs{} : ProblemCoeffs::convection_diffusion(0.0, 3.0);
    const MeshOperators ops = build_operators(m, p);
    const EigenResult e = solve_eigenproblem(ops, EigenOptions{}, symmetric);
    const CompositeFunction u(e.u), us(e.u_star);
    const auto f = assemble_functional(ops, u, e.lambda);
    const auto fs = adjoint_functional(ops, us, e.lambda_adjoint);
    CHECK(norm2(f) <= 1e-8 * norm2(ops.b.multiply(e.u.unknowns())) * e.lambda);
    CHECK(norm2(fs) <= 1e-8 * norm2(ops.b.multiply(e.u_star.unknowns())) * e.lambda);
  }
}

TEST_CASE("functionals of zero data vanish; adjoint equals primal without convection") {
  std::mt19937 rng(5);
  const MeshPtr m = build_mesh(DomainSpec::lshape(), 8);
  const MeshOperators ops = build_operators(m, ProblemCoeffs{});
  const CompositeFunction zero(FeFunction::zero(m));
  for (double v : assemble_functional(ops, zero, 0.0)) CHECK(v == 0.0);
  const CompositeFunction g(random_function(m, rng));
  const auto f = assemble_functional(ops, g, 2.5);
  const auto fs = adjoint_functional(ops, g, 2.5);
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(std::abs(f[k] - fs[k]) <= 1e-14);
}

TEST_CASE("prolongation is exact for nested spaces") {
  std::mt19937 rng(9);
  const MeshPtr coarse = build_mesh(DomainSpec::slit(), 4);
  const MeshPtr fine = refine_uniform(*refine_uniform(*coarse));
  const FeFunction g = random_function(coarse, rng);
  const FeFunction pg = prolongate(g, fine);
  // coarse vertices keep their values
  for (std::size_t v = 0; v < coarse->num_vertices(); ++v) {
    const Point p = coarse->vertices()[v];
    for (std::size_t w = 0; w < fine->num_vertices(); ++w) {
      if (fine->vertices()[w] == p) CHECK(pg.values()[w] == doctest::Approx(g.values()[v]).epsilon(1e-15));
    }
  }
  // integrals agree
  const auto integral = [](const FeFunction& f) {
    const SparseMatrix b = assemble_b_full(f.mesh(), ProblemCoeffs{});
    const std::vector<double> ones(f.mesh().num_vertices(), 1.0);
    return dot(ones, b.multiply(f.values()));
  };
  CHECK(std::abs(integral(pg) - integral(g)) <= 1e-12);
}

TEST_CASE("prolongation reproduces constants away from the boundary") {
  const MeshPtr coarse = build_mesh(DomainSpec::square(), 2);
  std::vector<double> values(coarse->num_vertices(), 0.0);
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (!coarse->is_dirichlet(int(v))) values[v] = 1.0;
  }
  const FeFunction g(coarse, values);
  const MeshPtr fine = refine_uniform(*coarse);
  const FeFunction pg = prolongate(g, fine);
  for (std::size_t v = 0; v < fine->num_vertices(); ++v) {
    const Point p = fine->vertices()[v];
    if (std::abs(p.x) <= 0.5 && std::abs(p.y) <= 0.5) CHECK(pg.values()[v] == doctest::Approx(1.0));
  }
}

TEST_CASE("non-nested transfer is rejected") {
  const MeshPtr a = build_mesh(DomainSpec::lshape(), 8);
  const MeshPtr b = build_mesh(DomainSpec::slit(), 8);
  std::mt19937 rng(1);
  try {
    prolongate(random_function(b, rng), a);
    FAIL("transfer between different domains accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Transfer);
  }
}
