#pragma once

#include <array>
#include <functional>
#include <memory>

#include <Eigen/Core>

#include "dgmg/mesh.hpp"

namespace dgmg {

using ScalarFn = std::function<double(const Vec2 &)>;
using GradientFn = std::function<Vec2(const Vec2 &)>;

/// Fully discontinuous piecewise-linear space on a mesh. Dof 3t+i is the
/// Lagrange node of triangle t at its local vertex i.
class DgSpace {
public:
  explicit DgSpace(std::shared_ptr<const Mesh> mesh);

  const Mesh &mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh> &mesh_ptr() const { return mesh_; }

  int dof_count() const { return 3 * mesh_->num_triangles(); }
  static int dof(int triangle, int local) { return 3 * triangle + local; }
  Vec2 node_coord(int dof) const { return mesh_->vertex(dof / 3, dof % 3); }

  /// Mesh size h_k = max element diameter.
  double h() const { return mesh_->h_max(); }
  double area(int t) const { return area_[t]; }
  const std::array<Vec2, 3> &basis_gradients(int t) const { return grads_[t]; }

  /// Values of the three local basis functions of t at x (barycentric coordinates).
  std::array<double, 3> basis_values(int t, const Vec2 &x) const;
  Vec2 map_point(int t, const std::array<double, 3> &bary) const;

private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<double> area_;
  std::vector<std::array<Vec2, 3>> grads_;
};

class ScalarField {
public:
  explicit ScalarField(std::shared_ptr<const DgSpace> space);
  ScalarField(std::shared_ptr<const DgSpace> space, Eigen::VectorXd coeffs);

  const DgSpace &space() const { return *space_; }
  const std::shared_ptr<const DgSpace> &space_ptr() const { return space_; }
  const Eigen::VectorXd &coeffs() const { return coeffs_; }
  Eigen::VectorXd &coeffs() { return coeffs_; }

  double value(int t, const Vec2 &x) const;
  Vec2 gradient(int t) const;

private:
  std::shared_ptr<const DgSpace> space_;
  Eigen::VectorXd coeffs_;
};

/// The unknown (p, y) of the saddle system. Stored as one stacked vector
/// [p; y] so the block operators act on it with a single mat-vec.
class PairField {
public:
  explicit PairField(std::shared_ptr<const DgSpace> space);
  PairField(std::shared_ptr<const DgSpace> space, Eigen::VectorXd stacked);
  PairField(const ScalarField &p, const ScalarField &y);

  const DgSpace &space() const { return *space_; }
  const std::shared_ptr<const DgSpace> &space_ptr() const { return space_; }
  int n() const { return space_->dof_count(); }

  const Eigen::VectorXd &data() const { return data_; }
  Eigen::VectorXd &data() { return data_; }
  auto p() { return data_.head(n()); }
  auto p() const { return data_.head(n()); }
  auto y() { return data_.tail(n()); }
  auto y() const { return data_.tail(n()); }

  ScalarField p_field() const { return {space_, data_.head(n())}; }
  ScalarField y_field() const { return {space_, data_.tail(n())}; }

  PairField &operator+=(const PairField &other);
  PairField &operator-=(const PairField &other);
  PairField &operator*=(double s);

private:
  std::shared_ptr<const DgSpace> space_;
  Eigen::VectorXd data_;
};

PairField operator+(PairField a, const PairField &b);
PairField operator-(PairField a, const PairField &b);
PairField operator*(double s, PairField a);

/// (u, v)_k = h_k^2 * sum over all element-local nodes of u_i v_i.
double mesh_inner_product(const ScalarField &u, const ScalarField &v);
/// [x, w]_k = (p, q)_k + (y, z)_k.
double pair_inner_product(const PairField &x, const PairField &w);

double l2_norm(const ScalarField &u);
double norm_1h(const ScalarField &u);
double norm_h1beta(const ScalarField &u, double beta);

/// Errors of a discrete field against a smooth function that vanishes on the boundary.
struct ErrorNorms {
  double l2 = 0.0;
  double one_h = 0.0;
};
ErrorNorms error_norms(const ScalarField &uh, const ScalarFn &u, const GradientFn &grad_u);

ScalarField project_analytic(std::shared_ptr<const DgSpace> space, const ScalarFn &f);

} // namespace dgmg
