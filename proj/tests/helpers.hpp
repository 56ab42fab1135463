#pragma once

#include <random>

#include <Eigen/Core>

#include "dgmg/bench.hpp"

namespace testutil {

inline Eigen::VectorXd random_vector(int n, std::mt19937_64 &rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(n);
  for (auto &x : v)
    x = nd(rng);
  return v;
}

inline double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline std::shared_ptr<const dgmg::LevelStack> square_stack(int K, double beta, dgmg::PrecondOptions po = {}) {
  dgmg::ProblemParams p;
  p.beta = beta;
  return dgmg::build_hierarchy(dgmg::Domain::unit_square, K, p, po);
}

} // namespace testutil
