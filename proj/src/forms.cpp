#include "dgmg/forms.hpp"

#include <cmath>
#include <ostream>
#include <vector>

#include "dgmg/errors.hpp"
#include "dgmg/quadrature.hpp"

namespace dgmg {

Coefficients Coefficients::constant(const Vec2 &zeta, double gamma) {
  return {[zeta](const Vec2 &) { return zeta; }, [](const Vec2 &) { return 0.0; },
          [gamma](const Vec2 &) { return gamma; }};
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(int n, const Triplets &entries) {
  SparseMatrix m(n, n);
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

// One element trace on an edge: jump = jump_sign * v, average = avg_weight * v.
struct Side {
  int t;
  double jump_sign;
  double avg_weight;
};

std::vector<Side> sides_of(const EdgeInfo &e) {
  if (e.on_boundary())
    return {{e.plus_element, 1.0, 1.0}};
  return {{e.plus_element, 1.0, 0.5}, {e.minus_element, -1.0, 0.5}};
}

template <class PointVisitor>
void for_each_edge_point(const Mesh &mesh, const EdgeInfo &e, PointVisitor visit) {
  const Vec2 a = mesh.vertices()[e.endpoints[0]], b = mesh.vertices()[e.endpoints[1]];
  for (const auto &qp : quad::edge_rule())
    visit(Vec2(a + qp.s * (b - a)), qp.weight * e.length);
}

} // namespace

SparseMatrix assemble_sip(const DgSpace &space, double sigma) {
  if (!(sigma > 0.0))
    throw ConfigError("penalty sigma must be positive");
  const Mesh &mesh = space.mesh();
  Triplets entries;
  entries.reserve(9 * mesh.num_triangles() + 36 * mesh.num_edges());

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto &g = space.basis_gradients(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        entries.emplace_back(DgSpace::dof(t, i), DgSpace::dof(t, j), space.area(t) * g[j].dot(g[i]));
  }

  for (const auto &e : mesh.edges()) {
    const auto sides = sides_of(e);
    const double penalty = sigma / e.length;
    for_each_edge_point(mesh, e, [&](const Vec2 &x, double w) {
      for (const Side &test : sides) {
        const auto phi_test = space.basis_values(test.t, x);
        const auto &g_test = space.basis_gradients(test.t);
        for (const Side &trial : sides) {
          const auto phi_trial = space.basis_values(trial.t, x);
          const auto &g_trial = space.basis_gradients(trial.t);
          for (int i = 0; i < 3; ++i) {
            const double jump_v = test.jump_sign * phi_test[i];
            const double avg_v = test.avg_weight * e.normal.dot(g_test[i]);
            for (int j = 0; j < 3; ++j) {
              const double jump_u = trial.jump_sign * phi_trial[j];
              const double avg_u = trial.avg_weight * e.normal.dot(g_trial[j]);
              const double val = -avg_u * jump_v - avg_v * jump_u + penalty * jump_u * jump_v;
              entries.emplace_back(DgSpace::dof(test.t, i), DgSpace::dof(trial.t, j), w * val);
            }
          }
        }
      }
    });
  }
  return from_triplets(space.dof_count(), entries);
}

SparseMatrix assemble_ar(const DgSpace &space, const Coefficients &coef) {
  const Mesh &mesh = space.mesh();
  Triplets entries;
  entries.reserve(9 * mesh.num_triangles() + 36 * mesh.num_edges());

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto &g = space.basis_gradients(t);
    for (const auto &qp : quad::triangle_rule()) {
      const Vec2 x = space.map_point(t, qp.bary);
      const double w = qp.weight * space.area(t);
      const Vec2 zeta = coef.zeta(x);
      const double gamma = coef.gamma(x);
      const auto &phi = qp.bary;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          entries.emplace_back(DgSpace::dof(t, i), DgSpace::dof(t, j),
                               w * (zeta.dot(g[j]) + gamma * phi[j]) * phi[i]);
    }
  }

  for (const auto &e : mesh.edges()) {
    if (e.on_boundary()) {
      const bool inflow = coef.zeta(e.midpoint(mesh.vertices())).dot(e.normal) < 0.0;
      if (inflow != (e.kind == EdgeKind::boundary_inflow))
        throw ContractViolation("assemble_ar: mesh edges are not classified for this velocity");
      if (!inflow)
        continue;
    }
    const auto sides = sides_of(e);
    for_each_edge_point(mesh, e, [&](const Vec2 &x, double w) {
      const double flux = e.normal.dot(coef.zeta(x));
      for (const Side &test : sides) {
        const auto phi_test = space.basis_values(test.t, x);
        for (const Side &trial : sides) {
          const auto phi_trial = space.basis_values(trial.t, x);
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              entries.emplace_back(DgSpace::dof(test.t, i), DgSpace::dof(trial.t, j),
                                   -w * flux * trial.jump_sign * phi_trial[j] * test.avg_weight *
                                       phi_test[i]);
        }
      }
    });
  }
  return from_triplets(space.dof_count(), entries);
}

SparseMatrix assemble_mass(const DgSpace &space) {
  const Mesh &mesh = space.mesh();
  Triplets entries;
  entries.reserve(9 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (const auto &qp : quad::triangle_rule()) {
      const double w = qp.weight * space.area(t);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          entries.emplace_back(DgSpace::dof(t, i), DgSpace::dof(t, j), w * qp.bary[j] * qp.bary[i]);
    }
  }
  return from_triplets(space.dof_count(), entries);
}

std::shared_ptr<const LevelOperators> assemble_level(std::shared_ptr<const DgSpace> space,
                                                     const ProblemParams &params) {
  if (!(params.beta > 0.0))
    throw ConfigError("beta must be positive");
  auto ops = std::make_shared<LevelOperators>();
  ops->space = space;
  ops->beta = params.beta;
  ops->sigma = params.sigma;
  ops->coef = params.coef;
  ops->A_sip = assemble_sip(*space, params.sigma);
  ops->A_ar = assemble_ar(*space, params.coef);
  ops->A = ops->A_sip + ops->A_ar;
  ops->M = assemble_mass(*space);

  const int n = space->dof_count();
  const double s = std::sqrt(params.beta);
  const SparseMatrix At = ops->A.transpose();
  Triplets entries;
  entries.reserve(2 * ops->A.nonZeros() + 2 * ops->M.nonZeros());
  auto add_block = [&](const SparseMatrix &m, int row0, int col0, double scale) {
    for (int r = 0; r < m.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(m, r); it; ++it)
        entries.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
  };
  add_block(At, 0, 0, s);
  add_block(ops->M, 0, n, -1.0);
  add_block(ops->M, n, 0, -1.0);
  add_block(ops->A, n, n, -s);
  ops->G.resize(2 * n, 2 * n);
  ops->G.setFromTriplets(entries.begin(), entries.end());
  ops->G.makeCompressed();
  ops->Gt = ops->G.transpose();
  ops->Gt.makeCompressed();
  return ops;
}

SaddleOperator::SaddleOperator(std::shared_ptr<const LevelOperators> ops) : ops_(std::move(ops)) {}

Eigen::VectorXd SaddleOperator::apply(const Eigen::VectorXd &x) const {
  return (ops_->G * x) / ops_->d();
}

Eigen::VectorXd SaddleOperator::apply_transpose(const Eigen::VectorXd &x) const {
  return (ops_->Gt * x) / ops_->d();
}

PairField SaddleOperator::apply(const PairField &x) const {
  if (x.space_ptr() != ops_->space)
    throw ContractViolation("SaddleOperator::apply: field on wrong level");
  return PairField(ops_->space, apply(x.data()));
}

PairField SaddleOperator::apply_transpose(const PairField &x) const {
  if (x.space_ptr() != ops_->space)
    throw ContractViolation("SaddleOperator::apply_transpose: field on wrong level");
  return PairField(ops_->space, apply_transpose(x.data()));
}

double SaddleOperator::form(const PairField &x, const PairField &w) const {
  if (x.space_ptr() != ops_->space || w.space_ptr() != ops_->space)
    throw ContractViolation("SaddleOperator::form: field on wrong level");
  return w.data().dot(ops_->G * x.data());
}

SaddleOperator assemble_saddle(std::shared_ptr<const DgSpace> space, const ProblemParams &params) {
  return SaddleOperator(assemble_level(std::move(space), params));
}

Eigen::VectorXd load_vector(const DgSpace &space, const ScalarFn &f) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.dof_count());
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    for (const auto &qp : quad::triangle_rule()) {
      const double fx = f(space.map_point(t, qp.bary)) * qp.weight * space.area(t);
      for (int i = 0; i < 3; ++i)
        b[DgSpace::dof(t, i)] += fx * qp.bary[i];
    }
  }
  return b;
}

PairField general_rhs(std::shared_ptr<const DgSpace> space, const ScalarFn &f_fun, const ScalarFn &g_fun) {
  const double d = space->h() * space->h();
  ScalarField f(space, load_vector(*space, f_fun) / d);
  ScalarField g(space, load_vector(*space, g_fun) / d);
  return PairField(f, g);
}

PairField load_functional(std::shared_ptr<const DgSpace> space, const ScalarFn &y_d, double beta) {
  if (!(beta > 0.0))
    throw ConfigError("beta must be positive");
  const double scale = -std::pow(beta, 0.25);
  return general_rhs(
      std::move(space), [&](const Vec2 &x) { return scale * y_d(x); }, [](const Vec2 &) { return 0.0; });
}

void write_coordinate(std::ostream &os, const SparseMatrix &m) {
  os.precision(17);
  for (int r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

} // namespace dgmg
