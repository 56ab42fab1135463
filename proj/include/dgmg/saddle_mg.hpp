#pragma once

#include <memory>
#include <vector>

#include <Eigen/LU>

#include "dgmg/hierarchy.hpp"

namespace dgmg {

enum class CycleKind { W, V };
/// primal solves B_k x = b; dual solves B_k^t x = b with B and B^t interchanged.
enum class Variant { primal, dual };

struct CycleConfig {
  int m1 = 1;
  int m2 = 1;
  CycleKind cycle = CycleKind::W;
  Variant variant = Variant::primal;
  /// Fine levels (beta^{1/2} h_k^{-2} >= 1) use
  /// lambda_k = min(w / lambda_max, C / (beta^{1/2} h_k^{-2} + 1)) with w = smoothing_weight.
  /// w = 4/3 is the Richardson weight that is optimal on [lambda_max/2, lambda_max].
  double damping_constant_C = 1.0;
  double smoothing_weight = 4.0 / 3.0;
  int max_power_iters = 200;
  double power_tol = 1e-6;

  /// Throws ConfigError on negative counts or m1 = m2 = 0.
  void validate() const;
};

struct EigEstimate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int level = 0;
  bool converged = true; // false: iteration cap hit, values are best estimates
};

/// Power iteration on T = B^t C^{-1} B (dual: B C^{-1} B^t), which is self-adjoint
/// and positive definite in [., .]_k. lambda_min comes from the shifted operator
/// lambda_max I - T. The start vector is seeded, so results are reproducible.
EigEstimate estimate_extreme_eigs(const LevelStack &stack, int k, Variant variant = Variant::primal,
                                  int max_iters = 200, double tol = 1e-6);

/// Same extremes by Lanczos with full reorthogonalization; much sharper than the
/// shifted power iteration for lambda_min on fine levels. converged is set once
/// both Ritz values change by less than tol over 10 steps.
EigEstimate lanczos_extreme_eigs(const LevelStack &stack, int k, Variant variant = Variant::primal,
                                 int max_steps = 800, double tol = 1e-8);
/// beta^{1/2} h_k^{-2}, the quantity that separates coarse from fine levels.
double level_indicator(const LevelStack &stack, int k);

double damping_factor(const LevelStack &stack, int k, const EigEstimate &eig, double damping_constant_C = 1.0,
                      double smoothing_weight = 4.0 / 3.0);

/// x_j = x_{j-1} + lambda C^{-1} B^t (b - B x_{j-1})  (dual: B and B^t swapped).
PairField smooth_pre(const LevelStack &stack, int k, const PairField &x, const PairField &b, double lambda,
                     int steps, Variant variant = Variant::primal);
/// x_j = x_{j-1} + lambda B^t C^{-1} (b - B x_{j-1})  (dual: B and B^t swapped).
PairField smooth_post(const LevelStack &stack, int k, const PairField &x, const PairField &b, double lambda,
                      int steps, Variant variant = Variant::primal);

/// |||x|||_{1,k} = [B^t C^{-1} B x, x]_k^{1/2}.
double energy_norm(const LevelStack &stack, int k, const PairField &x);
/// Dual counterpart built from B C^{-1} B^t.
double energy_norm_dual(const LevelStack &stack, int k, const PairField &x);
/// [x, x]_k^{1/2}, the s = 0 member of the scale.
double energy_norm_0(const PairField &x);

struct SolveReport {
  Eigen::VectorXd x;
  int cycles = 0;
  double relative_residual = 0.0;
  bool converged = false;
  std::vector<double> history;
};

/// W-/V-cycle engine for one LevelStack. Eigenvalue estimates and damping
/// factors for every level are computed at construction; afterwards the object
/// is immutable and cycles may run concurrently.
class SaddleMultigrid {
public:
  SaddleMultigrid(std::shared_ptr<const LevelStack> stack, CycleConfig config);
  /// Same stack and eigenvalue data, different smoothing counts.
  SaddleMultigrid with_smoothing(int m1, int m2) const;

  const LevelStack &stack() const { return *stack_; }
  const CycleConfig &config() const { return config_; }
  const EigEstimate &eig(int k) const { return (*eigs_)[k]; }
  double damping(int k) const { return damping_[k]; }

  /// One cycle MG(k, b, x0, m1, m2).
  PairField mg_solve(int k, const PairField &b, const PairField &x0) const;
  Eigen::VectorXd cycle(int k, const Eigen::VectorXd &b, Eigen::VectorXd x) const;

  /// Repeats cycles until ||b - B x|| <= rtol ||b|| or max_cycles.
  SolveReport solve(int k, const PairField &b, const PairField &x0, double rtol = 1e-10,
                    int max_cycles = 100) const;

  /// Direct solve on level 0.
  Eigen::VectorXd coarse_solve(const Eigen::VectorXd &b) const;

private:
  SaddleMultigrid() = default;

  std::shared_ptr<const LevelStack> stack_;
  CycleConfig config_;
  std::shared_ptr<const std::vector<EigEstimate>> eigs_;
  std::vector<double> damping_;
  std::shared_ptr<const Eigen::PartialPivLU<Eigen::MatrixXd>> coarse_;
};

/// Free-function form of SaddleMultigrid::mg_solve.
PairField mg_solve(const SaddleMultigrid &mg, int k, const PairField &b, const PairField &x0);

namespace detail {
Eigen::VectorXd apply_op(const Level &level, const Eigen::VectorXd &x, Variant v);
Eigen::VectorXd apply_adjoint(const Level &level, const Eigen::VectorXd &x, Variant v);
/// T x for the variant: B^t C^{-1} B x (primal) or B C^{-1} B^t x (dual).
Eigen::VectorXd apply_normal(const Level &level, const Eigen::VectorXd &x, Variant v);
void pre_smooth(const Level &level, Eigen::VectorXd &x, const Eigen::VectorXd &b, double lambda, int steps,
                Variant v);
void post_smooth(const Level &level, Eigen::VectorXd &x, const Eigen::VectorXd &b, double lambda, int steps,
                 Variant v);
} // namespace detail

} // namespace dgmg
