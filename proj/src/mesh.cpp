#include "dgmg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "dgmg/errors.hpp"

namespace dgmg {

Domain parse_domain(std::string_view tag) {
  if (tag == "unit_square" || tag == "square")
    return Domain::unit_square;
  if (tag == "l_shaped" || tag == "lshape" || tag == "l-shaped")
    return Domain::l_shaped;
  throw ConfigError("unknown domain '" + std::string(tag) + "' (expected square or l_shaped)");
}

std::string to_string(Domain d) { return d == Domain::unit_square ? "unit_square" : "l_shaped"; }

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles, int level,
           std::vector<int> parent_map)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)),
      parent_map_(std::move(parent_map)), level_(level) {
  for (int t = 0; t < num_triangles(); ++t) {
    if (!(signed_area(t) > 0.0))
      throw ContractViolation("triangle " + std::to_string(t) + " is not counterclockwise");
    h_max_ = std::max(h_max_, diameter(t));
  }
  build_edges();
}

double Mesh::signed_area(int t) const {
  const Vec2 a = vertex(t, 0), b = vertex(t, 1), c = vertex(t, 2);
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

double Mesh::diameter(int t) const {
  const Vec2 a = vertex(t, 0), b = vertex(t, 1), c = vertex(t, 2);
  return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

int Mesh::num_boundary_edges() const {
  return static_cast<int>(
      std::count_if(edges_.begin(), edges_.end(), [](const EdgeInfo &e) { return e.on_boundary(); }));
}

void Mesh::build_edges() {
  // std::map keeps the sorted vertex pairs in lexicographic order.
  std::map<std::array<int, 2>, std::vector<int>> incident;
  for (int t = 0; t < num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      int a = triangles_[t][i], b = triangles_[t][(i + 1) % 3];
      incident[{std::min(a, b), std::max(a, b)}].push_back(t);
    }
  }

  edges_.clear();
  edges_.reserve(incident.size());
  for (const auto &[key, tris] : incident) {
    if (tris.size() > 2)
      throw ContractViolation("non-manifold edge in triangulation");
    EdgeInfo e;
    e.endpoints = key;
    const Vec2 d = vertices_[key[1]] - vertices_[key[0]];
    e.length = d.norm();
    e.plus_element = tris.front(); // triangles were visited in increasing order
    e.minus_element = tris.size() == 2 ? tris.back() : -1;
    e.kind = tris.size() == 2 ? EdgeKind::interior : EdgeKind::boundary_outflow;

    Vec2 n(d.y(), -d.x());
    n /= e.length;
    // Orient n out of the plus element: it must point away from the opposite vertex.
    const auto &tri = triangles_[e.plus_element];
    int opposite = -1;
    for (int v : tri)
      if (v != key[0] && v != key[1])
        opposite = v;
    if (n.dot(vertices_[opposite] - vertices_[key[0]]) > 0.0)
      n = -n;
    e.normal = n;
    edges_.push_back(e);
  }
  if (zeta_)
    classify(zeta_);
}

void Mesh::classify(const VelocityFn &zeta) {
  zeta_ = zeta;
  for (auto &e : edges_) {
    if (!e.on_boundary())
      continue;
    const double flux = zeta ? zeta(e.midpoint(vertices_)).dot(e.normal) : 0.0;
    e.kind = flux < 0.0 ? EdgeKind::boundary_inflow : EdgeKind::boundary_outflow;
  }
}

Mesh build_initial_mesh(Domain domain) {
  switch (domain) {
  case Domain::unit_square:
    // Split along the (0,1)-(1,0) diagonal.
    return Mesh({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {{{0, 1, 2}}, {{1, 3, 2}}}, 0);
  case Domain::l_shaped: {
    // Three half-unit squares, each split along its NW-SE diagonal.
    std::vector<Vec2> v = {{0, 0}, {0.5, 0}, {1, 0}, {0, 0.5}, {0.5, 0.5}, {1, 0.5}, {0, 1}, {0.5, 1}};
    std::vector<std::array<int, 3>> t = {
        {{0, 1, 3}}, {{1, 4, 3}}, // [0,.5]^2
        {{1, 2, 4}}, {{2, 5, 4}}, // [.5,1]x[0,.5]
        {{3, 4, 6}}, {{4, 7, 6}}, // [0,.5]x[.5,1]
    };
    return Mesh(std::move(v), std::move(t), 0);
  }
  }
  throw ConfigError("unknown domain");
}

Mesh refine_uniform(const Mesh &mesh) {
  std::vector<Vec2> vertices = mesh.vertices();
  std::map<std::array<int, 2>, int> midpoint_index;
  auto midpoint = [&](int a, int b) {
    std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    auto [it, inserted] = midpoint_index.try_emplace(key, static_cast<int>(vertices.size()));
    if (inserted)
      vertices.push_back(0.5 * (mesh.vertices()[a] + mesh.vertices()[b]));
    return it->second;
  };

  std::vector<std::array<int, 3>> triangles;
  std::vector<int> parents;
  triangles.reserve(4 * mesh.triangles().size());
  parents.reserve(4 * mesh.triangles().size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto [a, b, c] = mesh.triangles()[t];
    const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    triangles.push_back({a, ab, ca});
    triangles.push_back({ab, b, bc});
    triangles.push_back({ca, bc, c});
    triangles.push_back({bc, ca, ab});
    parents.insert(parents.end(), 4, t);
  }
  Mesh fine(std::move(vertices), std::move(triangles), mesh.level() + 1, std::move(parents));
  if (mesh.classifying_velocity())
    fine.classify(mesh.classifying_velocity());
  return fine;
}

Mesh classify_edges(Mesh mesh, const VelocityFn &zeta) {
  mesh.classify(zeta);
  return mesh;
}

void write_mesh(std::ostream &os, const Mesh &mesh) {
  os << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.num_edges() << '\n';
  os.precision(17);
  for (const auto &v : mesh.vertices())
    os << v.x() << ' ' << v.y() << '\n';
  for (const auto &t : mesh.triangles())
    os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto &e : mesh.edges()) {
    const char *kind = e.kind == EdgeKind::interior          ? "interior"
                       : e.kind == EdgeKind::boundary_inflow ? "inflow"
                                                             : "outflow";
    os << e.endpoints[0] << ' ' << e.endpoints[1] << ' ' << e.plus_element << ' ' << e.minus_element
       << ' ' << e.normal.x() << ' ' << e.normal.y() << ' ' << kind << '\n';
  }
}

} // namespace dgmg
