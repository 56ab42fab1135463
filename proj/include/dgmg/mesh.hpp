#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace dgmg {

using Vec2 = Eigen::Vector2d;
using VelocityFn = std::function<Vec2(const Vec2 &)>;

enum class Domain { unit_square, l_shaped };

/// Accepts "unit_square"/"square" and "l_shaped"/"lshape"; throws ConfigError otherwise.
Domain parse_domain(std::string_view tag);
std::string to_string(Domain d);

enum class EdgeKind { interior, boundary_inflow, boundary_outflow };

struct EdgeInfo {
  std::array<int, 2> endpoints{}; // sorted vertex indices
  double length = 0.0;
  Vec2 normal = Vec2::Zero();     // out of plus_element; outward on the boundary
  int plus_element = -1;
  int minus_element = -1;         // -1 on the boundary
  EdgeKind kind = EdgeKind::interior;

  bool on_boundary() const { return minus_element < 0; }
  Vec2 midpoint(const std::vector<Vec2> &vertices) const {
    return 0.5 * (vertices[endpoints[0]] + vertices[endpoints[1]]);
  }
};

/// Conforming triangulation with counterclockwise triangles and lexicographically
/// ordered edges. Immutable once built.
class Mesh {
public:
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles, int level,
       std::vector<int> parent_map = {});

  const std::vector<Vec2> &vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>> &triangles() const { return triangles_; }
  const std::vector<EdgeInfo> &edges() const { return edges_; }
  const std::vector<int> &parent_map() const { return parent_map_; }

  int level() const { return level_; }
  double h_max() const { return h_max_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_boundary_edges() const;
  int num_interior_edges() const { return num_edges() - num_boundary_edges(); }

  double signed_area(int t) const;
  double diameter(int t) const;
  Vec2 vertex(int t, int local) const { return vertices_[triangles_[t][local]]; }

  /// Relabels boundary edges: inflow iff zeta(midpoint) . n < 0.
  void classify(const VelocityFn &zeta);
  const VelocityFn &classifying_velocity() const { return zeta_; }

private:
  void build_edges();

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<EdgeInfo> edges_;
  std::vector<int> parent_map_;
  VelocityFn zeta_;
  int level_ = 0;
  double h_max_ = 0.0;
};

Mesh build_initial_mesh(Domain domain);

/// Red refinement: every triangle is split into 4 congruent children through its
/// edge midpoints. Children of parent t are 4t..4t+3 with local vertex layout
/// (a, m_ab, m_ca), (m_ab, b, m_bc), (m_ca, m_bc, c), (m_bc, m_ca, m_ab).
/// Edges of the child mesh are reclassified with the velocity used on the parent.
Mesh refine_uniform(const Mesh &mesh);

Mesh classify_edges(Mesh mesh, const VelocityFn &zeta);

/// Debug dump: "nv nt ne" header, then vertices, triangles and edge records.
void write_mesh(std::ostream &os, const Mesh &mesh);

} // namespace dgmg
