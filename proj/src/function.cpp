// SPDX-License-Identifier: Apache-2.0

#include "ldc/function.hpp"

#include <cmath>

#include "ldc/error.hpp"

namespace ldc {

namespace {

std::array<Point, 3> corners_of(const Mesh& m, int t) {
  const auto& tri = m.triangles()[t];
  return {m.vertices()[tri[0]], m.vertices()[tri[1]], m.vertices()[tri[2]]};
}

// Some descendant of `key` exists in m (m is deeper than key).
bool has_descendant(const Mesh& m, TriKey key) {
  while (key.depth() < m.depth()) key = key.child(0);
  return m.find(key) >= 0;
}

}  // namespace

FeFunction::FeFunction(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (!mesh_) fail(ErrorCode::InvalidArgument, "function without mesh");
  if (values_.size() != mesh_->num_vertices()) {
    fail(ErrorCode::SizeMismatch, "one value per vertex required");
  }
  for (std::size_t v = 0; v < values_.size(); ++v) {
    if (mesh_->is_dirichlet(static_cast<int>(v)) && values_[v] != 0.0) {
      fail(ErrorCode::InvalidArgument, "nonzero value at a Dirichlet vertex");
    }
  }
}

FeFunction FeFunction::zero(MeshPtr mesh) {
  const std::size_t n = mesh->num_vertices();
  return FeFunction(std::move(mesh), std::vector<double>(n, 0.0));
}

FeFunction FeFunction::from_unknowns(MeshPtr mesh, std::span<const double> x) {
  if (static_cast<int>(x.size()) != mesh->num_unknowns()) {
    fail(ErrorCode::SizeMismatch, "unknown vector length mismatch");
  }
  std::vector<double> values(mesh->num_vertices(), 0.0);
  const auto verts = mesh->unknown_vertices();
  for (std::size_t k = 0; k < x.size(); ++k) values[verts[k]] = x[k];
  return FeFunction(std::move(mesh), std::move(values));
}

std::vector<double> FeFunction::unknowns() const {
  std::vector<double> x;
  x.reserve(mesh_->num_unknowns());
  for (int v : mesh_->unknown_vertices()) x.push_back(values_[v]);
  return x;
}

FeFunction FeFunction::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return FeFunction(mesh_, std::move(v));
}

double interpolate_linear(const std::array<Point, 3>& c,
                          const std::array<double, 3>& f, Point p) {
  const double area = signed_area(c[0], c[1], c[2]);
  const double l1 = signed_area(c[0], p, c[2]) / area;
  const double l2 = signed_area(c[0], c[1], p) / area;
  const double l0 = 1.0 - l1 - l2;
  return l0 * f[0] + l1 * f[1] + l2 * f[2];
}

// ---------------------------------------------------------------------------

void CompositeFunction::add_correction(SubdomainSpec region,
                                       FeFunction correction) {
  const Mesh& m = correction.mesh();
  const Mesh& base = base_.mesh();
  if (m.depth() <= base.depth() ||
      base.find(m.key(0).ancestor(base.depth())) < 0) {
    fail(ErrorCode::Transfer, "correction mesh is not nested under the base");
  }
  corrections_.push_back({region, std::move(correction)});
}

void CompositeFunction::sample(const FeFunction& f, TriKey key,
                               std::span<const Point> at, bool required,
                               std::array<double, 3>& out) const {
  const Mesh& m = f.mesh();
  if (m.depth() > key.depth()) {
    if (required || has_descendant(m, key)) {
      fail(ErrorCode::Transfer, "target cell is coarser than a contribution");
    }
    return;
  }
  const int t = m.find(key.ancestor(m.depth()));
  if (t < 0) {
    if (required) fail(ErrorCode::Transfer, "target not nested under base mesh");
    return;
  }
  const auto& tri = m.triangles()[t];
  const auto vals = f.values();
  const std::array<double, 3> fv{vals[tri[0]], vals[tri[1]], vals[tri[2]]};
  const auto corners = corners_of(m, t);
  for (std::size_t k = 0; k < at.size(); ++k) {
    out[k] += interpolate_linear(corners, fv, at[k]);
  }
}

std::array<double, 3> CompositeFunction::cell_values(
    const PartitionCell& cell) const {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  sample(base_, cell.key, cell.corners, true, out);
  for (const Correction& c : corrections_) {
    sample(c.values, cell.key, cell.corners, false, out);
  }
  return out;
}

std::vector<double> CompositeFunction::values_on(const Mesh& target) const {
  std::vector<double> values(target.num_vertices(), 0.0);
  std::vector<std::uint8_t> done(target.num_vertices(), 0);
  for (std::size_t t = 0; t < target.num_triangles(); ++t) {
    const auto& tri = target.triangles()[t];
    if (done[tri[0]] && done[tri[1]] && done[tri[2]]) continue;
    PartitionCell cell{target.key(static_cast<int>(t)),
                       corners_of(target, static_cast<int>(t))};
    const auto vals = cell_values(cell);
    for (int k = 0; k < 3; ++k) {
      values[tri[k]] = vals[k];
      done[tri[k]] = 1;
    }
  }
  return values;
}

CompositeFunction CompositeFunction::scaled(double factor) const {
  CompositeFunction out(base_.scaled(factor));
  for (const Correction& c : corrections_) {
    out.corrections_.push_back({c.region, c.values.scaled(factor)});
  }
  return out;
}

std::vector<LocalMesh> CompositeFunction::local_meshes() const {
  std::vector<LocalMesh> out;
  out.reserve(corrections_.size());
  for (const Correction& c : corrections_) {
    out.push_back({c.region, c.values.mesh_ptr()});
  }
  return out;
}

FeFunction prolongate(const FeFunction& g, MeshPtr fine) {
  if (!fine) fail(ErrorCode::InvalidArgument, "missing target mesh");
  const CompositeFunction wrapper(g);
  std::vector<double> values = wrapper.values_on(*fine);
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (fine->is_dirichlet(static_cast<int>(v))) {
      if (std::abs(values[v]) > 1e-12 * (1.0 + std::abs(values[v]))) {
        // A nonzero value on a fine Dirichlet vertex means the fine mesh
        // is not a refinement of the same domain.
        fail(ErrorCode::Transfer, "prolongation hits a nonzero boundary value");
      }
      values[v] = 0.0;
    }
  }
  return FeFunction(std::move(fine), std::move(values));
}

}  // namespace ldc
