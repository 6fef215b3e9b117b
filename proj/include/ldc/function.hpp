// SPDX-License-Identifier: Apache-2.0
//
// Piecewise-linear functions on nested meshes. A CompositeFunction is a base
// function on the global mesoscopic mesh plus a stack of local corrections,
// each living on a finer mesh over an aligned subdomain and vanishing on the
// subdomain's interior boundary.

#pragma once

#include <array>
#include <span>
#include <vector>

#include "ldc/mesh.hpp"

namespace ldc {

class FeFunction {
 public:
  FeFunction() = default;
  /// One value per vertex; Dirichlet vertices must carry 0.
  FeFunction(MeshPtr mesh, std::vector<double> values);

  static FeFunction zero(MeshPtr mesh);
  static FeFunction from_unknowns(MeshPtr mesh, std::span<const double> x);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  std::span<const double> values() const { return values_; }
  std::vector<double> unknowns() const;

  FeFunction scaled(double factor) const;

 private:
  MeshPtr mesh_;
  std::vector<double> values_;
};

/// Linear interpolation of `values` (one per vertex of the triangle
/// `corners`) at p.
double interpolate_linear(const std::array<Point, 3>& corners,
                          const std::array<double, 3>& values, Point p);

class CompositeFunction {
 public:
  struct Correction {
    SubdomainSpec region;
    FeFunction values;
  };

  CompositeFunction() = default;
  explicit CompositeFunction(FeFunction base) : base_(std::move(base)) {}

  const FeFunction& base() const { return base_; }
  std::span<const Correction> corrections() const { return corrections_; }

  /// The correction must be nested under the base mesh and vanish on the
  /// Dirichlet ring of its own mesh.
  void add_correction(SubdomainSpec region, FeFunction correction);

  /// Exact values at every vertex of `target`, which must be nested at least
  /// as deep as every contribution covering it.
  std::vector<double> values_on(const Mesh& target) const;

  /// Values at the three corners of a partition cell.
  std::array<double, 3> cell_values(const PartitionCell& cell) const;

  CompositeFunction scaled(double factor) const;

  std::vector<LocalMesh> local_meshes() const;

 private:
  void sample(const FeFunction& f, TriKey key, std::span<const Point> at,
              bool required, std::array<double, 3>& out) const;

  FeFunction base_;
  std::vector<Correction> corrections_;
};

/// Exact nodal interpolation of g on a mesh nested under g's mesh.
FeFunction prolongate(const FeFunction& g, MeshPtr fine);

}  // namespace ldc
