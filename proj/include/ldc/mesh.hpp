// SPDX-License-Identifier: Apache-2.0
//
// Conforming triangulations of the benchmark polygons, red refinement,
// restriction to aligned subdomains and the composite partition used to
// integrate functions that live on a hierarchy of nested local meshes.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

namespace ldc {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Segment {
  Point a;
  Point b;
};

/// Position of a triangle in a red-refinement hierarchy: the index of the
/// root triangle plus the child indices taken at every refinement.
///
/// All meshes produced by refine_uniform/extract_submesh from one root mesh
/// share the key space, which is what makes nested transfers exact: the
/// ancestor of a fine triangle in a coarser mesh is found by truncating the
/// path.
class TriKey {
 public:
  static constexpr int kMaxDepth = 17;

  constexpr TriKey() = default;

  static TriKey root(std::uint32_t index);

  TriKey child(int c) const;
  TriKey ancestor(int depth) const;

  int depth() const { return static_cast<int>((bits_ >> kPathBits) & 0x1f); }
  std::uint32_t root_index() const {
    return static_cast<std::uint32_t>(bits_ >> (kPathBits + 5));
  }
  std::uint64_t bits() const { return bits_; }

  friend bool operator==(const TriKey&, const TriKey&) = default;

 private:
  static constexpr int kPathBits = 35;
  explicit constexpr TriKey(std::uint64_t bits) : bits_(bits) {}
  std::uint64_t bits_ = 0;
};

enum class DomainKind { LShape, Slit, Square, Rectangle };

/// LShape = (-1,1)^2 \ [0,1]x[-1,0], Slit = (-1,1)^2 \ {0}x[-1,0],
/// Square = (-1,1)^2. Rectangle uses the explicit bounds.
struct DomainSpec {
  DomainKind kind = DomainKind::Square;
  double x0 = -1.0;
  double x1 = 1.0;
  double y0 = -1.0;
  double y1 = 1.0;

  static DomainSpec lshape() { return {DomainKind::LShape}; }
  static DomainSpec slit() { return {DomainKind::Slit}; }
  static DomainSpec square() { return {DomainKind::Square}; }
  static DomainSpec rectangle(double x0, double x1, double y0, double y1) {
    return {DomainKind::Rectangle, x0, x1, y0, y1};
  }

  double area() const;
};

enum class SubdomainKind { ScaledLShape, ScaledSlit, Rectangle };

/// Local refinement region. The scaled kinds are the domain shapes shrunk
/// about the origin by `scale`; Rectangle is the open box (x0,x1)x(y0,y1).
struct SubdomainSpec {
  SubdomainKind kind = SubdomainKind::Rectangle;
  double scale = 1.0;
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;
  int level = 0;

  static SubdomainSpec scaled_lshape(double scale, int level = 0);
  static SubdomainSpec scaled_slit(double scale, int level = 0);
  static SubdomainSpec rectangle(double x0, double x1, double y0, double y1,
                                 int level = 0);

  // Interior test (open set). Points on the slit count as interior for
  // ScaledSlit since the slit has zero measure.
  bool contains(Point p) const;
  bool contains_closure(Point p) const;
  // Geometric nesting: the closure of `inner` lies in the closure of *this.
  bool encloses(const SubdomainSpec& inner) const;
  double area() const;

  // Equality ignores `level`.
  bool same_region(const SubdomainSpec& other) const;
};

class Mesh;
using MeshPtr = std::shared_ptr<const Mesh>;

/// Immutable conforming triangulation with Dirichlet marking.
class Mesh {
 public:
  using Triangle = std::array<int, 3>;

  /// Validates the triangulation (positive areas, every edge shared by at
  /// most two triangles), marks Dirichlet vertices (endpoints of boundary
  /// edges and vertices on constraint segments) and numbers the unknowns.
  static MeshPtr create(std::vector<Point> vertices,
                        std::vector<Triangle> triangles,
                        std::vector<Segment> constraints, double spacing,
                        std::vector<TriKey> keys, std::vector<int> parent = {});

  std::span<const Point> vertices() const { return vertices_; }
  std::span<const Triangle> triangles() const { return triangles_; }
  std::span<const Segment> constraints() const { return constraints_; }
  std::span<const int> parent() const { return parent_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  int num_unknowns() const { return static_cast<int>(unknowns_.size()); }

  bool is_dirichlet(int v) const { return dirichlet_[v] != 0; }
  /// Unknown index of vertex v, -1 for Dirichlet vertices.
  int dof(int v) const { return dof_[v]; }
  /// Vertex index of unknown k.
  std::span<const int> unknown_vertices() const { return unknowns_; }

  /// Largest element diameter.
  double h() const { return h_; }
  /// Grid step of the underlying uniform grid.
  double spacing() const { return spacing_; }
  /// Refinement depth of every triangle key, relative to the root mesh.
  int depth() const { return depth_; }

  TriKey key(int t) const { return keys_[t]; }
  /// Triangle with the given key, or -1.
  int find(TriKey key) const;

  double area(int t) const;
  double total_area() const;
  Point centroid(int t) const;

 private:
  Mesh() = default;

  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Segment> constraints_;
  std::vector<std::uint8_t> dirichlet_;
  std::vector<int> dof_;
  std::vector<int> unknowns_;
  std::vector<TriKey> keys_;
  std::vector<int> parent_;
  std::unordered_map<std::uint64_t, int> key_index_;
  double h_ = 0.0;
  double spacing_ = 0.0;
  int depth_ = 0;
};

/// Uniform grid of squares of side 1/n split along the lower-left to
/// upper-right diagonal.
MeshPtr build_mesh(const DomainSpec& domain, int n);

/// Red refinement: every triangle is split into four congruent children
/// through its edge midpoints. The child order is (v0,m01,m20), (m01,v1,m12),
/// (m20,m12,v2), (m01,m12,m20).
MeshPtr refine_uniform(const Mesh& m);

struct Submesh {
  MeshPtr mesh;
  std::vector<int> to_global;  // local vertex -> vertex of the source mesh
};

/// Restriction of m to the subdomain. Vertices on the subdomain boundary
/// become Dirichlet vertices of the local mesh.
Submesh extract_submesh(const Mesh& m, const SubdomainSpec& s);

/// A mesh on an aligned subdomain, nested in the global hierarchy.
struct LocalMesh {
  SubdomainSpec region;
  MeshPtr mesh;
};

struct PartitionCell {
  TriKey key;
  std::array<Point, 3> corners;
};

/// Tiling of the domain by the finest available cell at every point.
class CompositePartition {
 public:
  explicit CompositePartition(std::vector<PartitionCell> cells)
      : cells_(std::move(cells)) {}

  std::span<const PartitionCell> cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  double area() const;

 private:
  std::vector<PartitionCell> cells_;
};

CompositePartition composite_partition(const Mesh& base,
                                       std::span<const LocalMesh> corrections);

/// Plain-text dump: "V T" header, then "x y dirichlet" per vertex, then
/// "i j k" per triangle.
void write_mesh(const Mesh& m, std::ostream& out);

double signed_area(Point a, Point b, Point c);

}  // namespace ldc
