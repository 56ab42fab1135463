#include "dgmg/quadrature.hpp"

#include <cmath>

namespace dgmg::quad {

const std::array<TrianglePoint, 6> &triangle_rule() {
  static const std::array<TrianglePoint, 6> rule = [] {
    constexpr double a1 = 0.44594849091596488632, w1 = 0.22338158967801146570;
    constexpr double a2 = 0.09157621350977074346, w2 = 0.10995174365532186764;
    constexpr double b1 = 1.0 - 2.0 * a1, b2 = 1.0 - 2.0 * a2;
    return std::array<TrianglePoint, 6>{{
        {{a1, a1, b1}, w1},
        {{a1, b1, a1}, w1},
        {{b1, a1, a1}, w1},
        {{a2, a2, b2}, w2},
        {{a2, b2, a2}, w2},
        {{b2, a2, a2}, w2},
    }};
  }();
  return rule;
}

const std::array<EdgePoint, 3> &edge_rule() {
  static const std::array<EdgePoint, 3> rule = [] {
    const double r = 0.5 * std::sqrt(3.0 / 5.0);
    return std::array<EdgePoint, 3>{{{0.5 - r, 5.0 / 18.0}, {0.5, 8.0 / 18.0}, {0.5 + r, 5.0 / 18.0}}};
  }();
  return rule;
}

} // namespace dgmg::quad
