#pragma once

#include <array>

namespace dgmg::quad {

/// Point in barycentric coordinates with its weight (weights sum to 1).
struct TrianglePoint {
  std::array<double, 3> bary;
  double weight;
};

/// Symmetric 6-point rule, exact for polynomials of degree 4.
const std::array<TrianglePoint, 6> &triangle_rule();

/// Gauss point on an edge parameterized by s in [0, 1] (weights sum to 1).
struct EdgePoint {
  double s;
  double weight;
};

/// 3-point Gauss-Legendre rule, exact for polynomials of degree 5.
const std::array<EdgePoint, 3> &edge_rule();

} // namespace dgmg::quad
