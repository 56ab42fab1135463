#pragma once

#include <memory>
#include <vector>

#include "dgmg/forms.hpp"
#include "dgmg/mesh.hpp"
#include "dgmg/precond.hpp"

namespace dgmg {

struct Level {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const DgSpace> space;
  std::shared_ptr<const LevelOperators> ops;
  SaddleOperator saddle;
  BlockPreconditioner precond;
};

/// Nested levels T_0..T_K with their operators, the natural injections and the
/// block preconditioners. Immutable after build_hierarchy.
class LevelStack {
public:
  LevelStack(Domain domain, ProblemParams params, std::vector<Level> levels, std::vector<SparseMatrix> injections,
             std::shared_ptr<const ReactionDiffusionMultigrid> inner);

  Domain domain() const { return domain_; }
  const ProblemParams &params() const { return params_; }
  int max_level() const { return static_cast<int>(levels_.size()) - 1; }
  const Level &level(int k) const;
  /// P_k: coefficient map V_{k-1} -> V_k (k >= 1).
  const SparseMatrix &injection(int k) const;
  const ReactionDiffusionMultigrid &inner_multigrid() const { return *inner_; }

private:
  Domain domain_;
  ProblemParams params_;
  std::vector<Level> levels_;
  std::vector<SparseMatrix> injections_;
  std::shared_ptr<const ReactionDiffusionMultigrid> inner_;
};

constexpr int kMaxLevels = 12;

/// Throws ConfigError for K < 0 or K > kMaxLevels.
std::shared_ptr<const LevelStack> build_hierarchy(Domain domain, int K, const ProblemParams &params,
                                                  const PrecondOptions &precond = {});

/// Injection matrix of a red refinement: each fine node gets the barycentric
/// weights of its position in the parent triangle.
SparseMatrix injection_matrix(const Mesh &coarse, const Mesh &fine);

PairField inject(const LevelStack &stack, int k, const PairField &coarse);
/// Transpose of inject in the mesh-dependent inner products: D_{k-1}^{-1} P_k^T D_k.
PairField restrict_to_coarse(const LevelStack &stack, int k, const PairField &fine);

/// Raw stacked-vector versions used inside the cycles.
Eigen::VectorXd inject_stacked(const LevelStack &stack, int k, const Eigen::VectorXd &coarse);
Eigen::VectorXd restrict_stacked(const LevelStack &stack, int k, const Eigen::VectorXd &fine);

/// min over quadrature points of gamma - div(zeta)/2 (the advection assumption margin).
double advection_margin(const DgSpace &space, const Coefficients &coef);

} // namespace dgmg
