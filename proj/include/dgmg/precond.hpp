#pragma once

#include <memory>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <Eigen/Core>

#include "dgmg/dg_space.hpp"
#include "dgmg/forms.hpp"

namespace dgmg {

enum class InnerSmoother { jacobi, gauss_seidel };

struct PrecondOptions {
  int inner_cycles = 1;
  int inner_smoothing = 4; // pre- and post-smoothing sweeps
  int jacobi_power_iters = 100;
  /// Coarse inner matrices as P^T K P from the finest level instead of rediscretized ones.
  bool galerkin_coarse = false;
  /// jacobi: damped point Jacobi, weight 2/(3 rho). gauss_seidel: forward sweeps
  /// before the coarse correction, backward sweeps after it.
  InnerSmoother smoother = InnerSmoother::gauss_seidel;
  /// Test oracle: replace the cycle by a sparse Cholesky solve on every level.
  bool exact = false;
};

/// Geometric V-cycle for the SIP reaction-diffusion matrices
/// K_j = beta^{1/2} A_sip,j + M_j on the nested levels 0..K. The smoother sweeps
/// mirror each other around the coarse correction and level 0 is solved by
/// Cholesky, so one cycle from a zero guess is a fixed symmetric positive
/// definite linear map.
class ReactionDiffusionMultigrid {
public:
  /// injections[j] maps level j-1 to level j; injections[0] is ignored.
  ReactionDiffusionMultigrid(std::vector<SparseMatrix> matrices, std::vector<SparseMatrix> injections,
                             PrecondOptions options = {});

  int max_level() const { return static_cast<int>(K_.size()) - 1; }
  const SparseMatrix &matrix(int k) const { return K_[k]; }
  double jacobi_weight(int k) const { return weight_[k]; }
  const PrecondOptions &options() const { return options_; }

  /// Approximates K_k^{-1} rhs column by column with options().inner_cycles cycles.
  Eigen::MatrixXd solve(int k, const Eigen::MatrixXd &rhs) const;

private:
  Eigen::MatrixXd vcycle(int k, const Eigen::MatrixXd &rhs) const;
  void smooth(int k, const Eigen::MatrixXd &rhs, Eigen::MatrixXd &u, bool zero_guess) const;
  void gauss_seidel(int k, const Eigen::MatrixXd &rhs, Eigen::MatrixXd &u, bool forward) const;

  std::vector<SparseMatrix> K_;
  std::vector<SparseMatrix> P_;
  std::vector<SparseMatrix> Pt_;
  std::vector<Eigen::VectorXd> scaled_inv_diag_; // weight / diag(K)
  std::vector<double> weight_;
  Eigen::LLT<Eigen::MatrixXd> coarse_;
  std::vector<std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>> exact_;
  PrecondOptions options_;
};

/// C_k = diag(L_k, L_k); L_k^{-1} phi is one inner multigrid solve of
/// K_k u = D_k phi, which keeps C_k^{-1} self-adjoint in [., .]_k.
class BlockPreconditioner {
public:
  BlockPreconditioner(std::shared_ptr<const ReactionDiffusionMultigrid> mg, std::shared_ptr<const DgSpace> space,
                      int level);

  int level() const { return level_; }

  ScalarField apply_Lk_inverse(const ScalarField &phi) const;
  PairField apply_Ck_inverse(const PairField &x) const;
  /// Raw version on a stacked [p; y] vector.
  Eigen::VectorXd apply(const Eigen::VectorXd &stacked) const;

private:
  std::shared_ptr<const ReactionDiffusionMultigrid> mg_;
  std::shared_ptr<const DgSpace> space_;
  int level_;
};

} // namespace dgmg
