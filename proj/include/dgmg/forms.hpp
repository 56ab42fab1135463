#pragma once

#include <memory>

#include <Eigen/Sparse>

#include "dgmg/dg_space.hpp"

namespace dgmg {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Advection velocity zeta and reaction gamma of the state operator. div_zeta is
/// only used for the coercivity check gamma - div(zeta)/2 >= 0.
struct Coefficients {
  VelocityFn zeta;
  ScalarFn div_zeta;
  ScalarFn gamma;

  static Coefficients constant(const Vec2 &zeta, double gamma);
};

struct ProblemParams {
  double beta = 1e-2;
  double sigma = 6.0;
  Coefficients coef = Coefficients::constant(Vec2(1.0, 0.0), 0.0);
};

/// Entries a_sip(phi_j, phi_i): symmetric interior penalty over all edges, so
/// boundary edges impose homogeneous Dirichlet data weakly.
SparseMatrix assemble_sip(const DgSpace &space, double sigma);

/// Entries a_ar(phi_j, phi_i) of the centered-flux advection-reaction form; the
/// face term runs over interior and inflow edges. The mesh must already be
/// classified for coef.zeta.
SparseMatrix assemble_ar(const DgSpace &space, const Coefficients &coef);

SparseMatrix assemble_mass(const DgSpace &space);

/// Assembled Galerkin matrices of one level. The mesh-dependent inner product is
/// D = h^2 I, so every operator acting on coefficient vectors is D^{-1} times a
/// Galerkin matrix.
struct LevelOperators {
  std::shared_ptr<const DgSpace> space;
  SparseMatrix A_sip;
  SparseMatrix A_ar;
  SparseMatrix A;  // A_sip + A_ar
  SparseMatrix M;
  SparseMatrix G;  // [[s A^T, -M], [-M, -s A]] with s = beta^{1/2}
  SparseMatrix Gt; // G^T
  double beta = 0.0;
  double sigma = 0.0;
  Coefficients coef;

  double h() const { return space->h(); }
  /// Diagonal entry of D = h^2 I.
  double d() const { return space->h() * space->h(); }
};

std::shared_ptr<const LevelOperators> assemble_level(std::shared_ptr<const DgSpace> space,
                                                     const ProblemParams &params);

/// System operator of the saddle problem, defined by [B x, w]_k = B_h(x, w).
class SaddleOperator {
public:
  explicit SaddleOperator(std::shared_ptr<const LevelOperators> ops);

  const LevelOperators &ops() const { return *ops_; }
  const std::shared_ptr<const DgSpace> &space_ptr() const { return ops_->space; }

  PairField apply(const PairField &x) const;
  PairField apply_transpose(const PairField &x) const;
  Eigen::VectorXd apply(const Eigen::VectorXd &x) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd &x) const;

  /// The bilinear form B_h(x, w) = w^T G x.
  double form(const PairField &x, const PairField &w) const;

private:
  std::shared_ptr<const LevelOperators> ops_;
};

SaddleOperator assemble_saddle(std::shared_ptr<const DgSpace> space, const ProblemParams &params);

/// (f, 0) with [(f, 0), (q, z)]_k = -beta^{1/4} (y_d, q).
PairField load_functional(std::shared_ptr<const DgSpace> space, const ScalarFn &y_d, double beta);

/// (f, g) with [(f, g), (q, z)]_k = (f_fun, q) + (g_fun, z).
PairField general_rhs(std::shared_ptr<const DgSpace> space, const ScalarFn &f_fun, const ScalarFn &g_fun);

/// L2 load vector b_i = (f, phi_i), no D^{-1} scaling.
Eigen::VectorXd load_vector(const DgSpace &space, const ScalarFn &f);

/// Writes "i j value" lines (0-based) for offline inspection.
void write_coordinate(std::ostream &os, const SparseMatrix &m);

} // namespace dgmg
