// SPDX-License-Identifier: Apache-2.0

#include "ldc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "ldc/error.hpp"

namespace ldc {

namespace {

std::uint64_t edge_id(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

bool on_segment(Point p, const Segment& s) {
  const double cross =
      (s.b.x - s.a.x) * (p.y - s.a.y) - (s.b.y - s.a.y) * (p.x - s.a.x);
  if (std::abs(cross) > 1e-14) return false;
  return p.x >= std::min(s.a.x, s.b.x) - 1e-14 &&
         p.x <= std::max(s.a.x, s.b.x) + 1e-14 &&
         p.y >= std::min(s.a.y, s.b.y) - 1e-14 &&
         p.y <= std::max(s.a.y, s.b.y) + 1e-14;
}

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

struct Box {
  double x0, x1, y0, y1;
};

std::vector<Box> boxes_of(const SubdomainSpec& s) {
  const double a = s.scale;
  switch (s.kind) {
    case SubdomainKind::ScaledLShape:
      return {{-a, 0, -a, 0}, {-a, 0, 0, a}, {0, a, 0, a}};
    case SubdomainKind::ScaledSlit:
      return {{-a, a, -a, a}};
    case SubdomainKind::Rectangle:
      return {{s.x0, s.x1, s.y0, s.y1}};
  }
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------
// TriKey

TriKey TriKey::root(std::uint32_t index) {
  if (index >= (1u << 24)) {
    fail(ErrorCode::InvalidArgument, "triangle index exceeds key capacity");
  }
  return TriKey(static_cast<std::uint64_t>(index) << (kPathBits + 5));
}

TriKey TriKey::child(int c) const {
  const int d = depth();
  if (d >= kMaxDepth) {
    fail(ErrorCode::InvalidArgument, "refinement depth exceeds key capacity");
  }
  const std::uint64_t path = bits_ & ((std::uint64_t{1} << kPathBits) - 1);
  const std::uint64_t head = bits_ >> (kPathBits + 5);
  return TriKey((head << (kPathBits + 5)) |
                (static_cast<std::uint64_t>(d + 1) << kPathBits) |
                ((path << 2) | static_cast<std::uint64_t>(c)));
}

TriKey TriKey::ancestor(int depth) const {
  const int d = this->depth();
  if (depth > d || depth < 0) {
    fail(ErrorCode::Transfer, "ancestor depth out of range");
  }
  const std::uint64_t path = bits_ & ((std::uint64_t{1} << kPathBits) - 1);
  const std::uint64_t head = bits_ >> (kPathBits + 5);
  return TriKey((head << (kPathBits + 5)) |
                (static_cast<std::uint64_t>(depth) << kPathBits) |
                (path >> (2 * (d - depth))));
}

// ---------------------------------------------------------------------------
// Domain and subdomain geometry

double DomainSpec::area() const {
  switch (kind) {
    case DomainKind::LShape:
      return 3.0;
    case DomainKind::Slit:
    case DomainKind::Square:
      return 4.0;
    case DomainKind::Rectangle:
      return (x1 - x0) * (y1 - y0);
  }
  return 0.0;
}

SubdomainSpec SubdomainSpec::scaled_lshape(double scale, int level) {
  SubdomainSpec s;
  s.kind = SubdomainKind::ScaledLShape;
  s.scale = scale;
  s.level = level;
  return s;
}

SubdomainSpec SubdomainSpec::scaled_slit(double scale, int level) {
  SubdomainSpec s;
  s.kind = SubdomainKind::ScaledSlit;
  s.scale = scale;
  s.level = level;
  return s;
}

SubdomainSpec SubdomainSpec::rectangle(double x0, double x1, double y0,
                                       double y1, int level) {
  if (!(x0 < x1) || !(y0 < y1)) {
    fail(ErrorCode::InvalidArgument, "empty rectangle subdomain");
  }
  SubdomainSpec s;
  s.kind = SubdomainKind::Rectangle;
  s.x0 = x0;
  s.x1 = x1;
  s.y0 = y0;
  s.y1 = y1;
  s.level = level;
  return s;
}

bool SubdomainSpec::contains(Point p) const {
  switch (kind) {
    case SubdomainKind::ScaledLShape:
      return std::abs(p.x) < scale && std::abs(p.y) < scale &&
             !(p.x >= 0.0 && p.y <= 0.0);
    case SubdomainKind::ScaledSlit:
      return std::abs(p.x) < scale && std::abs(p.y) < scale;
    case SubdomainKind::Rectangle:
      return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1;
  }
  return false;
}

bool SubdomainSpec::contains_closure(Point p) const {
  switch (kind) {
    case SubdomainKind::ScaledLShape:
      return std::abs(p.x) <= scale && std::abs(p.y) <= scale &&
             !(p.x > 0.0 && p.y < 0.0);
    case SubdomainKind::ScaledSlit:
      return std::abs(p.x) <= scale && std::abs(p.y) <= scale;
    case SubdomainKind::Rectangle:
      return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  return false;
}

bool SubdomainSpec::encloses(const SubdomainSpec& inner) const {
  // Both regions are unions of axis-aligned boxes, so testing the centre of
  // every elementary cell of the joint breakpoint grid is exact.
  const auto outer_boxes = boxes_of(*this);
  const auto inner_boxes = boxes_of(inner);
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto* list : {&outer_boxes, &inner_boxes}) {
    for (const Box& b : *list) {
      xs.insert(xs.end(), {b.x0, b.x1});
      ys.insert(ys.end(), {b.y0, b.y1});
    }
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      if (xs[i] == xs[i + 1] || ys[j] == ys[j + 1]) continue;
      const Point c{0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])};
      if (inner.contains(c) && !contains(c)) return false;
    }
  }
  return true;
}

double SubdomainSpec::area() const {
  switch (kind) {
    case SubdomainKind::ScaledLShape:
      return 3.0 * scale * scale;
    case SubdomainKind::ScaledSlit:
      return 4.0 * scale * scale;
    case SubdomainKind::Rectangle:
      return (x1 - x0) * (y1 - y0);
  }
  return 0.0;
}

bool SubdomainSpec::same_region(const SubdomainSpec& o) const {
  if (kind != o.kind) return false;
  if (kind == SubdomainKind::Rectangle) {
    return x0 == o.x0 && x1 == o.x1 && y0 == o.y0 && y1 == o.y1;
  }
  return scale == o.scale;
}

double signed_area(Point a, Point b, Point c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

// ---------------------------------------------------------------------------
// Mesh

MeshPtr Mesh::create(std::vector<Point> vertices,
                     std::vector<Triangle> triangles,
                     std::vector<Segment> constraints, double spacing,
                     std::vector<TriKey> keys, std::vector<int> parent) {
  if (keys.size() != triangles.size()) {
    fail(ErrorCode::InvalidArgument, "one key per triangle required");
  }
  if (!parent.empty() && parent.size() != triangles.size()) {
    fail(ErrorCode::InvalidArgument, "parent map size mismatch");
  }
  std::shared_ptr<Mesh> m(new Mesh());
  m->vertices_ = std::move(vertices);
  m->triangles_ = std::move(triangles);
  m->constraints_ = std::move(constraints);
  m->keys_ = std::move(keys);
  m->parent_ = std::move(parent);
  m->spacing_ = spacing;

  const int nv = static_cast<int>(m->vertices_.size());
  std::unordered_map<std::uint64_t, int> edge_count;
  edge_count.reserve(3 * m->triangles_.size());
  double h = 0.0;
  for (const Triangle& t : m->triangles_) {
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv) {
        fail(ErrorCode::InvalidArgument, "triangle references missing vertex");
      }
    }
    const Point& a = m->vertices_[t[0]];
    const Point& b = m->vertices_[t[1]];
    const Point& c = m->vertices_[t[2]];
    if (!(signed_area(a, b, c) > 0.0)) {
      fail(ErrorCode::InvalidArgument, "triangle with non-positive area");
    }
    for (int k = 0; k < 3; ++k) {
      const Point& p = m->vertices_[t[k]];
      const Point& q = m->vertices_[t[(k + 1) % 3]];
      h = std::max(h, std::hypot(p.x - q.x, p.y - q.y));
      if (++edge_count[edge_id(t[k], t[(k + 1) % 3])] > 2) {
        fail(ErrorCode::InvalidArgument, "edge shared by more than two triangles");
      }
    }
  }
  m->h_ = h;

  m->dirichlet_.assign(nv, 0);
  for (const auto& [id, count] : edge_count) {
    if (count == 1) {
      m->dirichlet_[static_cast<int>(id & 0xffffffffu)] = 1;
      m->dirichlet_[static_cast<int>(id >> 32)] = 1;
    }
  }
  for (int v = 0; v < nv; ++v) {
    for (const Segment& s : m->constraints_) {
      if (on_segment(m->vertices_[v], s)) m->dirichlet_[v] = 1;
    }
  }
  m->dof_.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (!m->dirichlet_[v]) {
      m->dof_[v] = static_cast<int>(m->unknowns_.size());
      m->unknowns_.push_back(v);
    }
  }

  m->depth_ = m->keys_.empty() ? 0 : m->keys_.front().depth();
  m->key_index_.reserve(m->keys_.size());
  for (std::size_t t = 0; t < m->keys_.size(); ++t) {
    if (m->keys_[t].depth() != m->depth_) {
      fail(ErrorCode::InvalidArgument, "mixed refinement depths in one mesh");
    }
    if (!m->key_index_.emplace(m->keys_[t].bits(), static_cast<int>(t)).second) {
      fail(ErrorCode::InvalidArgument, "duplicate triangle key");
    }
  }
  return m;
}

int Mesh::find(TriKey key) const {
  const auto it = key_index_.find(key.bits());
  return it == key_index_.end() ? -1 : it->second;
}

double Mesh::area(int t) const {
  const Triangle& tri = triangles_[t];
  return signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    sum += area(static_cast<int>(t));
  }
  return sum;
}

Point Mesh::centroid(int t) const {
  const Triangle& tri = triangles_[t];
  const Point& a = vertices_[tri[0]];
  const Point& b = vertices_[tri[1]];
  const Point& c = vertices_[tri[2]];
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

// ---------------------------------------------------------------------------
// Construction

MeshPtr build_mesh(const DomainSpec& domain, int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "grid needs n >= 1");
  const double x0 = domain.kind == DomainKind::Rectangle ? domain.x0 : -1.0;
  const double x1 = domain.kind == DomainKind::Rectangle ? domain.x1 : 1.0;
  const double y0 = domain.kind == DomainKind::Rectangle ? domain.y0 : -1.0;
  const double y1 = domain.kind == DomainKind::Rectangle ? domain.y1 : 1.0;
  if (!(x0 < x1) || !(y0 < y1)) {
    fail(ErrorCode::InvalidArgument, "empty domain");
  }
  const double fx = (x1 - x0) * n;
  const double fy = (y1 - y0) * n;
  if (!is_integer(fx) || !is_integer(fy) || !is_integer(x0 * n) ||
      !is_integer(y0 * n)) {
    fail(ErrorCode::Alignment, "domain bounds are not grid lines of 1/n");
  }
  // The re-entrant corner and the slit sit on x = 0 / y = 0.
  if (domain.kind == DomainKind::LShape || domain.kind == DomainKind::Slit) {
    if (!is_integer(-x0 * n) || !is_integer(-y0 * n)) {
      fail(ErrorCode::Alignment, "singular point is not a grid vertex");
    }
  }
  const int nx = static_cast<int>(std::lround(fx));
  const int ny = static_cast<int>(std::lround(fy));

  auto coord = [n](double origin, int i) {
    return origin + static_cast<double>(i) / static_cast<double>(n);
  };
  auto grid_index = [nx](int i, int j) { return j * (nx + 1) + i; };

  std::vector<Mesh::Triangle> grid_triangles;
  grid_triangles.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (domain.kind == DomainKind::LShape) {
        const double cx = coord(x0, i) + 0.5 / n;
        const double cy = coord(y0, j) + 0.5 / n;
        if (cx > 0.0 && cy < 0.0) continue;
      }
      const int ll = grid_index(i, j);
      const int lr = grid_index(i + 1, j);
      const int ur = grid_index(i + 1, j + 1);
      const int ul = grid_index(i, j + 1);
      grid_triangles.push_back({ll, lr, ur});
      grid_triangles.push_back({ll, ur, ul});
    }
  }

  std::vector<int> remap((nx + 1) * (ny + 1), -1);
  for (const auto& t : grid_triangles) {
    for (int v : t) remap[v] = 0;
  }
  std::vector<Point> vertices;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const int g = grid_index(i, j);
      if (remap[g] < 0) continue;
      remap[g] = static_cast<int>(vertices.size());
      vertices.push_back({coord(x0, i), coord(y0, j)});
    }
  }
  std::vector<TriKey> keys;
  keys.reserve(grid_triangles.size());
  for (std::size_t t = 0; t < grid_triangles.size(); ++t) {
    for (int& v : grid_triangles[t]) v = remap[v];
    keys.push_back(TriKey::root(static_cast<std::uint32_t>(t)));
  }
  std::vector<Segment> constraints;
  if (domain.kind == DomainKind::Slit) {
    constraints.push_back({{0.0, -1.0}, {0.0, 0.0}});
  }
  return Mesh::create(std::move(vertices), std::move(grid_triangles),
                      std::move(constraints), 1.0 / n, std::move(keys));
}

MeshPtr refine_uniform(const Mesh& m) {
  std::vector<Point> vertices(m.vertices().begin(), m.vertices().end());
  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(3 * m.num_triangles());
  auto mid = [&](int a, int b) {
    const auto [it, inserted] =
        midpoint.emplace(edge_id(a, b), static_cast<int>(vertices.size()));
    if (inserted) {
      const Point& p = vertices[a];
      const Point& q = vertices[b];
      vertices.push_back({0.5 * (p.x + q.x), 0.5 * (p.y + q.y)});
    }
    return it->second;
  };

  std::vector<Mesh::Triangle> triangles;
  std::vector<TriKey> keys;
  std::vector<int> parent;
  triangles.reserve(4 * m.num_triangles());
  keys.reserve(4 * m.num_triangles());
  parent.reserve(4 * m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& [v0, v1, v2] = m.triangles()[t];
    const int m01 = mid(v0, v1);
    const int m12 = mid(v1, v2);
    const int m20 = mid(v2, v0);
    const std::array<Mesh::Triangle, 4> children{{{v0, m01, m20},
                                                  {m01, v1, m12},
                                                  {m20, m12, v2},
                                                  {m01, m12, m20}}};
    for (int c = 0; c < 4; ++c) {
      triangles.push_back(children[c]);
      keys.push_back(m.key(static_cast<int>(t)).child(c));
      parent.push_back(static_cast<int>(t));
    }
  }
  return Mesh::create(std::move(vertices), std::move(triangles),
                      {m.constraints().begin(), m.constraints().end()},
                      0.5 * m.spacing(), std::move(keys), std::move(parent));
}

Submesh extract_submesh(const Mesh& m, const SubdomainSpec& s) {
  const auto check_line = [&](double v) {
    if (!is_integer(v / m.spacing())) {
      std::ostringstream msg;
      msg << "subdomain boundary " << v << " is not a grid line of spacing "
          << m.spacing();
      fail(ErrorCode::Alignment, msg.str());
    }
  };
  for (const Box& b : boxes_of(s)) {
    check_line(b.x0);
    check_line(b.x1);
    check_line(b.y0);
    check_line(b.y1);
  }

  std::vector<int> to_local(m.num_vertices(), -1);
  std::vector<int> to_global;
  std::vector<Mesh::Triangle> triangles;
  std::vector<TriKey> keys;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles()[t];
    const bool inside = s.contains(m.centroid(static_cast<int>(t)));
    for (int v : tri) {
      const Point p = m.vertices()[v];
      if (inside ? !s.contains_closure(p) : s.contains(p)) {
        fail(ErrorCode::Alignment, "subdomain cuts through a mesh triangle");
      }
    }
    if (!inside) continue;
    Mesh::Triangle local{};
    for (int k = 0; k < 3; ++k) {
      int& slot = to_local[tri[k]];
      if (slot < 0) {
        slot = static_cast<int>(to_global.size());
        to_global.push_back(tri[k]);
      }
      local[k] = slot;
    }
    triangles.push_back(local);
    keys.push_back(m.key(static_cast<int>(t)));
  }
  if (triangles.empty()) {
    fail(ErrorCode::Alignment, "subdomain contains no mesh triangle");
  }
  std::vector<Point> vertices;
  vertices.reserve(to_global.size());
  for (int g : to_global) vertices.push_back(m.vertices()[g]);
  auto local = Mesh::create(std::move(vertices), std::move(triangles),
                            {m.constraints().begin(), m.constraints().end()},
                            m.spacing(), std::move(keys));
  // Global Dirichlet marks survive restriction (a boundary vertex of the
  // domain is always on the boundary of the submesh or on a constraint).
  for (std::size_t v = 0; v < to_global.size(); ++v) {
    if (m.is_dirichlet(to_global[v]) && !local->is_dirichlet(static_cast<int>(v))) {
      fail(ErrorCode::Alignment, "global Dirichlet vertex lost in submesh");
    }
  }
  return {std::move(local), std::move(to_global)};
}

// ---------------------------------------------------------------------------
// Composite partition

double CompositePartition::area() const {
  double sum = 0.0;
  for (const auto& c : cells_) {
    sum += signed_area(c.corners[0], c.corners[1], c.corners[2]);
  }
  return sum;
}

CompositePartition composite_partition(const Mesh& base,
                                       std::span<const LocalMesh> corrections) {
  std::vector<const Mesh*> meshes{&base};
  for (const LocalMesh& lm : corrections) {
    if (!lm.mesh) fail(ErrorCode::Partition, "missing correction mesh");
    if (lm.mesh->depth() <= base.depth()) {
      fail(ErrorCode::Partition, "correction mesh is not finer than the base");
    }
    meshes.push_back(lm.mesh.get());
  }

  // Every correction triangle must descend from a base triangle and lie in
  // its declared region.
  for (std::size_t i = 0; i < corrections.size(); ++i) {
    const Mesh& cm = *corrections[i].mesh;
    for (std::size_t t = 0; t < cm.num_triangles(); ++t) {
      const auto ti = static_cast<int>(t);
      if (base.find(cm.key(ti).ancestor(base.depth())) < 0) {
        fail(ErrorCode::Partition, "correction mesh not nested in the base mesh");
      }
      if (!corrections[i].region.contains(cm.centroid(ti))) {
        fail(ErrorCode::Partition, "correction mesh leaves its subdomain");
      }
    }
  }

  std::unordered_map<std::uint64_t, char> present;
  for (const Mesh* m : meshes) {
    for (std::size_t t = 0; t < m->num_triangles(); ++t) {
      present.emplace(m->key(static_cast<int>(t)).bits(), 0);
    }
  }
  auto has = [&](TriKey k) { return present.count(k.bits()) != 0; };

  std::vector<PartitionCell> cells;
  for (const Mesh* m : meshes) {
    for (std::size_t t = 0; t < m->num_triangles(); ++t) {
      const TriKey key = m->key(static_cast<int>(t));
      char& emitted = present[key.bits()];
      if (emitted) continue;
      emitted = 1;
      const int refined = has(key.child(0)) + has(key.child(1)) +
                          has(key.child(2)) + has(key.child(3));
      if (refined == 4) continue;
      if (refined != 0) {
        fail(ErrorCode::Partition, "partially refined cell (gap in partition)");
      }
      const auto& tri = m->triangles()[t];
      cells.push_back({key,
                       {m->vertices()[tri[0]], m->vertices()[tri[1]],
                        m->vertices()[tri[2]]}});
    }
  }

  CompositePartition partition(std::move(cells));
  const double expected = base.total_area();
  if (std::abs(partition.area() - expected) > 1e-12 * expected) {
    fail(ErrorCode::Partition, "partition area does not match the base mesh");
  }
  return partition;
}

void write_mesh(const Mesh& m, std::ostream& out) {
  out << m.num_vertices() << ' ' << m.num_triangles() << '\n';
  out.precision(17);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const Point& p = m.vertices()[v];
    out << p.x << ' ' << p.y << ' ' << (m.is_dirichlet(static_cast<int>(v)) ? 1 : 0)
        << '\n';
  }
  for (const auto& t : m.triangles()) {
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
}

}  // namespace ldc
