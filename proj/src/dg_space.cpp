#include "dgmg/dg_space.hpp"

#include <cmath>

#include "dgmg/errors.hpp"
#include "dgmg/quadrature.hpp"

namespace dgmg {

DgSpace::DgSpace(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  const int nt = mesh_->num_triangles();
  area_.resize(nt);
  grads_.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const double area = mesh_->signed_area(t);
    area_[t] = area;
    for (int i = 0; i < 3; ++i) {
      // grad lambda_i = rot(v_{i+2} - v_{i+1}) / (2|T|), pointing toward vertex i.
      const Vec2 e = mesh_->vertex(t, (i + 2) % 3) - mesh_->vertex(t, (i + 1) % 3);
      grads_[t][i] = Vec2(-e.y(), e.x()) / (2.0 * area);
    }
  }
}

std::array<double, 3> DgSpace::basis_values(int t, const Vec2 &x) const {
  const Vec2 centroid = (mesh_->vertex(t, 0) + mesh_->vertex(t, 1) + mesh_->vertex(t, 2)) / 3.0;
  const Vec2 d = x - centroid;
  return {1.0 / 3.0 + grads_[t][0].dot(d), 1.0 / 3.0 + grads_[t][1].dot(d),
          1.0 / 3.0 + grads_[t][2].dot(d)};
}

Vec2 DgSpace::map_point(int t, const std::array<double, 3> &bary) const {
  return bary[0] * mesh_->vertex(t, 0) + bary[1] * mesh_->vertex(t, 1) + bary[2] * mesh_->vertex(t, 2);
}

ScalarField::ScalarField(std::shared_ptr<const DgSpace> space)
    : space_(std::move(space)), coeffs_(Eigen::VectorXd::Zero(space_->dof_count())) {}

ScalarField::ScalarField(std::shared_ptr<const DgSpace> space, Eigen::VectorXd coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != space_->dof_count())
    throw ContractViolation("ScalarField: coefficient length does not match space");
}

double ScalarField::value(int t, const Vec2 &x) const {
  const auto phi = space_->basis_values(t, x);
  return phi[0] * coeffs_[3 * t] + phi[1] * coeffs_[3 * t + 1] + phi[2] * coeffs_[3 * t + 2];
}

Vec2 ScalarField::gradient(int t) const {
  const auto &g = space_->basis_gradients(t);
  return coeffs_[3 * t] * g[0] + coeffs_[3 * t + 1] * g[1] + coeffs_[3 * t + 2] * g[2];
}

PairField::PairField(std::shared_ptr<const DgSpace> space)
    : space_(std::move(space)), data_(Eigen::VectorXd::Zero(2 * space_->dof_count())) {}

PairField::PairField(std::shared_ptr<const DgSpace> space, Eigen::VectorXd stacked)
    : space_(std::move(space)), data_(std::move(stacked)) {
  if (data_.size() != 2 * space_->dof_count())
    throw ContractViolation("PairField: stacked length does not match space");
}

PairField::PairField(const ScalarField &p, const ScalarField &y) : space_(p.space_ptr()) {
  if (p.space_ptr() != y.space_ptr())
    throw ContractViolation("PairField: components live on different spaces");
  data_.resize(2 * space_->dof_count());
  data_ << p.coeffs(), y.coeffs();
}

namespace {
void require_same(const DgSpace &a, const DgSpace &b) {
  if (&a != &b)
    throw ContractViolation("fields live on different spaces");
}
} // namespace

PairField &PairField::operator+=(const PairField &other) {
  require_same(*space_, other.space());
  data_ += other.data_;
  return *this;
}

PairField &PairField::operator-=(const PairField &other) {
  require_same(*space_, other.space());
  data_ -= other.data_;
  return *this;
}

PairField &PairField::operator*=(double s) {
  data_ *= s;
  return *this;
}

PairField operator+(PairField a, const PairField &b) { return a += b; }
PairField operator-(PairField a, const PairField &b) { return a -= b; }
PairField operator*(double s, PairField a) { return a *= s; }

double mesh_inner_product(const ScalarField &u, const ScalarField &v) {
  require_same(u.space(), v.space());
  const double h = u.space().h();
  return h * h * u.coeffs().dot(v.coeffs());
}

double pair_inner_product(const PairField &x, const PairField &w) {
  require_same(x.space(), w.space());
  const double h = x.space().h();
  return h * h * x.data().dot(w.data());
}

namespace {

// Shared evaluator for the broken norms; value/grad are evaluated elementwise
// so the same code serves discrete fields and (exact - discrete) errors.
template <class Value, class Grad>
ErrorNorms broken_norms(const DgSpace &space, Value value, Grad grad) {
  const Mesh &mesh = space.mesh();
  double l2 = 0.0, volume = 0.0, jumps = 0.0, fluxes = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (const auto &qp : quad::triangle_rule()) {
      const Vec2 x = space.map_point(t, qp.bary);
      const double w = qp.weight * space.area(t);
      const double v = value(t, x);
      l2 += w * v * v;
      volume += w * grad(t, x).squaredNorm();
    }
  }
  for (const auto &e : mesh.edges()) {
    const Vec2 a = mesh.vertices()[e.endpoints[0]], b = mesh.vertices()[e.endpoints[1]];
    for (const auto &qp : quad::edge_rule()) {
      const Vec2 x = a + qp.s * (b - a);
      const double w = qp.weight * e.length;
      double jump, avg;
      if (e.on_boundary()) {
        jump = value(e.plus_element, x);
        avg = e.normal.dot(grad(e.plus_element, x));
      } else {
        jump = value(e.plus_element, x) - value(e.minus_element, x);
        avg = 0.5 * e.normal.dot(grad(e.plus_element, x) + grad(e.minus_element, x));
      }
      jumps += w * jump * jump / e.length;
      fluxes += w * e.length * avg * avg;
    }
  }
  return {std::sqrt(l2), std::sqrt(volume + jumps + fluxes)};
}

ErrorNorms field_norms(const ScalarField &u) {
  return broken_norms(
      u.space(), [&](int t, const Vec2 &x) { return u.value(t, x); },
      [&](int t, const Vec2 &) { return u.gradient(t); });
}

} // namespace

double l2_norm(const ScalarField &u) { return field_norms(u).l2; }

double norm_1h(const ScalarField &u) { return field_norms(u).one_h; }

double norm_h1beta(const ScalarField &u, double beta) {
  if (!(beta > 0.0))
    throw ConfigError("beta must be positive");
  const auto n = field_norms(u);
  return std::sqrt(std::sqrt(beta) * n.one_h * n.one_h + n.l2 * n.l2);
}

ErrorNorms error_norms(const ScalarField &uh, const ScalarFn &u, const GradientFn &grad_u) {
  return broken_norms(
      uh.space(), [&](int t, const Vec2 &x) { return u(x) - uh.value(t, x); },
      [&](int t, const Vec2 &x) { return Vec2(grad_u(x) - uh.gradient(t)); });
}

ScalarField project_analytic(std::shared_ptr<const DgSpace> space, const ScalarFn &f) {
  ScalarField out(space);
  for (int i = 0; i < space->dof_count(); ++i)
    out.coeffs()[i] = f(space->node_coord(i));
  return out;
}

} // namespace dgmg
