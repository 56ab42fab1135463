#include "dgmg/hierarchy.hpp"

#include <algorithm>
#include <iostream>
#include <limits>

#include "dgmg/errors.hpp"
#include "dgmg/quadrature.hpp"

namespace dgmg {

LevelStack::LevelStack(Domain domain, ProblemParams params, std::vector<Level> levels,
                       std::vector<SparseMatrix> injections, std::shared_ptr<const ReactionDiffusionMultigrid> inner)
    : domain_(domain), params_(std::move(params)), levels_(std::move(levels)), injections_(std::move(injections)),
      inner_(std::move(inner)) {}

const Level &LevelStack::level(int k) const {
  if (k < 0 || k > max_level())
    throw ContractViolation("level " + std::to_string(k) + " not in hierarchy");
  return levels_[k];
}

const SparseMatrix &LevelStack::injection(int k) const {
  if (k < 1 || k > max_level())
    throw ContractViolation("no injection into level " + std::to_string(k));
  return injections_[k];
}

SparseMatrix injection_matrix(const Mesh &coarse, const Mesh &fine) {
  // Parent barycentric coordinates of the child vertices, following the child
  // layout produced by refine_uniform.
  static constexpr double kChildBary[4][3][3] = {
      {{1, 0, 0}, {0.5, 0.5, 0}, {0.5, 0, 0.5}},
      {{0.5, 0.5, 0}, {0, 1, 0}, {0, 0.5, 0.5}},
      {{0.5, 0, 0.5}, {0, 0.5, 0.5}, {0, 0, 1}},
      {{0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}},
  };
  if (fine.num_triangles() != 4 * coarse.num_triangles() ||
      static_cast<int>(fine.parent_map().size()) != fine.num_triangles())
    throw ContractViolation("injection_matrix: meshes are not a red refinement pair");

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(9 * fine.num_triangles());
  for (int c = 0; c < fine.num_triangles(); ++c) {
    const int parent = fine.parent_map()[c];
    const auto &bary = kChildBary[c % 4];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (bary[i][j] != 0.0)
          entries.emplace_back(DgSpace::dof(c, i), DgSpace::dof(parent, j), bary[i][j]);
  }
  SparseMatrix P(3 * fine.num_triangles(), 3 * coarse.num_triangles());
  P.setFromTriplets(entries.begin(), entries.end());
  P.makeCompressed();
  return P;
}

double advection_margin(const DgSpace &space, const Coefficients &coef) {
  double margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < space.mesh().num_triangles(); ++t)
    for (const auto &qp : quad::triangle_rule()) {
      const Vec2 x = space.map_point(t, qp.bary);
      margin = std::min(margin, coef.gamma(x) - 0.5 * coef.div_zeta(x));
    }
  return margin;
}

std::shared_ptr<const LevelStack> build_hierarchy(Domain domain, int K, const ProblemParams &params,
                                                  const PrecondOptions &precond) {
  if (K < 0 || K > kMaxLevels)
    throw ConfigError("number of levels must be in [0, " + std::to_string(kMaxLevels) + "]");
  if (!(params.beta > 0.0))
    throw ConfigError("beta must be positive");

  std::vector<std::shared_ptr<const Mesh>> meshes;
  meshes.push_back(std::make_shared<const Mesh>(classify_edges(build_initial_mesh(domain), params.coef.zeta)));
  for (int k = 1; k <= K; ++k)
    meshes.push_back(std::make_shared<const Mesh>(refine_uniform(*meshes.back())));

  std::vector<std::shared_ptr<const DgSpace>> spaces;
  std::vector<std::shared_ptr<const LevelOperators>> ops;
  std::vector<SparseMatrix> injections(K + 1);
  std::vector<SparseMatrix> rd_matrices;
  const double s = std::sqrt(params.beta);
  for (int k = 0; k <= K; ++k) {
    spaces.push_back(std::make_shared<const DgSpace>(meshes[k]));
    ops.push_back(assemble_level(spaces[k], params));
    if (k > 0)
      injections[k] = injection_matrix(*meshes[k - 1], *meshes[k]);
    SparseMatrix rd = s * ops[k]->A_sip + ops[k]->M;
    rd.makeCompressed();
    rd_matrices.push_back(std::move(rd));
  }

  const double margin = advection_margin(*spaces[0], params.coef);
  if (margin < 0.0)
    std::cerr << "warning: gamma - div(zeta)/2 reaches " << margin
              << " < 0; the advection-reaction form may lose coercivity\n";

  auto inner = std::make_shared<const ReactionDiffusionMultigrid>(rd_matrices, injections, precond);

  std::vector<Level> levels;
  levels.reserve(K + 1);
  for (int k = 0; k <= K; ++k)
    levels.push_back(Level{meshes[k], spaces[k], ops[k], SaddleOperator(ops[k]), BlockPreconditioner(inner, spaces[k], k)});

  return std::make_shared<const LevelStack>(domain, params, std::move(levels), std::move(injections),
                                            std::move(inner));
}

Eigen::VectorXd inject_stacked(const LevelStack &stack, int k, const Eigen::VectorXd &coarse) {
  const SparseMatrix &P = stack.injection(k);
  const int nc = static_cast<int>(P.cols()), nf = static_cast<int>(P.rows());
  if (coarse.size() != 2 * nc)
    throw ContractViolation("inject: vector does not live on level k-1");
  Eigen::VectorXd out(2 * nf);
  out.head(nf) = P * coarse.head(nc);
  out.tail(nf) = P * coarse.tail(nc);
  return out;
}

Eigen::VectorXd restrict_stacked(const LevelStack &stack, int k, const Eigen::VectorXd &fine) {
  const SparseMatrix &P = stack.injection(k);
  const int nc = static_cast<int>(P.cols()), nf = static_cast<int>(P.rows());
  if (fine.size() != 2 * nf)
    throw ContractViolation("restrict: vector does not live on level k");
  const double scale = stack.level(k).ops->d() / stack.level(k - 1).ops->d();
  Eigen::VectorXd out(2 * nc);
  out.head(nc) = scale * (P.transpose() * fine.head(nf));
  out.tail(nc) = scale * (P.transpose() * fine.tail(nf));
  return out;
}

PairField inject(const LevelStack &stack, int k, const PairField &coarse) {
  if (coarse.space_ptr() != stack.level(k - 1).space)
    throw ContractViolation("inject: field does not live on level k-1");
  return PairField(stack.level(k).space, inject_stacked(stack, k, coarse.data()));
}

PairField restrict_to_coarse(const LevelStack &stack, int k, const PairField &fine) {
  if (fine.space_ptr() != stack.level(k).space)
    throw ContractViolation("restrict: field does not live on level k");
  return PairField(stack.level(k - 1).space, restrict_stacked(stack, k, fine.data()));
}

} // namespace dgmg
