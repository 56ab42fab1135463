#include "dgmg/saddle_mg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "dgmg/errors.hpp"

namespace dgmg {

void CycleConfig::validate() const {
  if (m1 < 0 || m2 < 0)
    throw ConfigError("smoothing step counts must be nonnegative");
  if (m1 == 0 && m2 == 0)
    throw ConfigError("at least one of m1, m2 must be positive");
  if (!(damping_constant_C > 0.0))
    throw ConfigError("damping constant must be positive");
  if (!(smoothing_weight > 0.0 && smoothing_weight < 2.0))
    throw ConfigError("smoothing weight must lie in (0, 2)");
  if (max_power_iters < 1 || !(power_tol > 0.0))
    throw ConfigError("invalid power iteration controls");
}

namespace detail {

Eigen::VectorXd apply_op(const Level &level, const Eigen::VectorXd &x, Variant v) {
  return v == Variant::primal ? level.saddle.apply(x) : level.saddle.apply_transpose(x);
}

Eigen::VectorXd apply_adjoint(const Level &level, const Eigen::VectorXd &x, Variant v) {
  return v == Variant::primal ? level.saddle.apply_transpose(x) : level.saddle.apply(x);
}

Eigen::VectorXd apply_normal(const Level &level, const Eigen::VectorXd &x, Variant v) {
  return apply_adjoint(level, level.precond.apply(apply_op(level, x, v)), v);
}

void pre_smooth(const Level &level, Eigen::VectorXd &x, const Eigen::VectorXd &b, double lambda, int steps,
                Variant v) {
  for (int j = 0; j < steps; ++j)
    x += lambda * level.precond.apply(apply_adjoint(level, b - apply_op(level, x, v), v));
}

void post_smooth(const Level &level, Eigen::VectorXd &x, const Eigen::VectorXd &b, double lambda, int steps,
                 Variant v) {
  for (int j = 0; j < steps; ++j)
    x += lambda * apply_adjoint(level, level.precond.apply(b - apply_op(level, x, v)), v);
}

} // namespace detail

namespace {

// Dominant eigenvalue of a symmetric operator by power iteration with Rayleigh
// quotients; the Euclidean product is a fixed multiple of [., .]_k.
template <class Op>
std::pair<double, bool> power_iteration(Op op, Eigen::VectorXd v, int max_iters, double tol) {
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd w = op(v);
    const double next = v.dot(w);
    const double wn = w.norm();
    if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next))
      return {next, true};
    lambda = next;
    if (wn == 0.0)
      return {0.0, true};
    v = w / wn;
  }
  return {lambda, false};
}

Eigen::VectorXd seeded_vector(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(size);
  for (auto &x : v)
    x = dist(rng);
  return v;
}

} // namespace

EigEstimate estimate_extreme_eigs(const LevelStack &stack, int k, Variant variant, int max_iters, double tol) {
  const Level &level = stack.level(k);
  const int size = 2 * level.space->dof_count();
  auto T = [&](const Eigen::VectorXd &v) { return detail::apply_normal(level, v, variant); };

  const auto [lmax, ok_max] = power_iteration(T, seeded_vector(size, 0x5eed0000u + k), max_iters, tol);
  auto shifted = [&](const Eigen::VectorXd &v) { return Eigen::VectorXd(lmax * v - T(v)); };
  const auto [mu, ok_min] = power_iteration(shifted, seeded_vector(size, 0x5eed1000u + k), max_iters, tol);

  EigEstimate e;
  e.level = k;
  e.lambda_max = lmax;
  e.lambda_min = lmax - mu;
  e.converged = ok_max && ok_min;
  return e;
}

EigEstimate lanczos_extreme_eigs(const LevelStack &stack, int k, Variant variant, int max_steps, double tol) {
  const Level &level = stack.level(k);
  const int size = 2 * level.space->dof_count();
  const int steps = std::min(max_steps, size);
  Eigen::MatrixXd Q(size, steps);
  Eigen::VectorXd alpha(steps), beta(steps);
  Q.col(0) = seeded_vector(size, 0x5eed2000u + k).normalized();

  EigEstimate e;
  e.level = k;
  e.converged = false;
  double prev_min = 0.0, prev_max = 0.0;
  for (int j = 0; j < steps; ++j) {
    Eigen::VectorXd w = detail::apply_normal(level, Q.col(j), variant);
    alpha[j] = Q.col(j).dot(w);
    // two passes of classical Gram-Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass)
      w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
    beta[j] = w.norm();

    const bool last = j + 1 == steps || beta[j] <= 1e-14 * std::abs(alpha[j]);
    if ((j + 1) % 10 == 0 || last) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(alpha.head(j + 1), beta.head(j), Eigen::EigenvaluesOnly);
      const double lo = tri.eigenvalues()[0], hi = tri.eigenvalues()[j];
      if (j + 1 > 10 && std::abs(lo - prev_min) <= tol * lo && std::abs(hi - prev_max) <= tol * hi)
        e.converged = true;
      e.lambda_min = prev_min = lo;
      e.lambda_max = prev_max = hi;
      if (e.converged)
        break;
    }
    if (last) {
      // invariant subspace found: the Ritz values are exact
      e.converged = e.converged || j + 1 < steps || steps == size;
      break;
    }
    Q.col(j + 1) = w / beta[j];
  }
  return e;
}

double level_indicator(const LevelStack &stack, int k) {
  const double h = stack.level(k).space->h();
  return std::sqrt(stack.params().beta) / (h * h);
}

double damping_factor(const LevelStack &stack, int k, const EigEstimate &eig, double damping_constant_C,
                      double smoothing_weight) {
  const double q = level_indicator(stack, k);
  if (q >= 1.0)
    return std::min(smoothing_weight / eig.lambda_max, damping_constant_C / (q + 1.0));
  return 2.0 / (eig.lambda_min + eig.lambda_max);
}

namespace {
const Level &level_of(const LevelStack &stack, int k, const PairField &field) {
  const Level &level = stack.level(k);
  if (field.space_ptr() != level.space)
    throw ContractViolation("field does not live on level " + std::to_string(k));
  return level;
}
} // namespace

PairField smooth_pre(const LevelStack &stack, int k, const PairField &x, const PairField &b, double lambda,
                     int steps, Variant variant) {
  const Level &level = level_of(stack, k, x);
  level_of(stack, k, b);
  Eigen::VectorXd out = x.data();
  detail::pre_smooth(level, out, b.data(), lambda, steps, variant);
  return PairField(level.space, std::move(out));
}

PairField smooth_post(const LevelStack &stack, int k, const PairField &x, const PairField &b, double lambda,
                      int steps, Variant variant) {
  const Level &level = level_of(stack, k, x);
  level_of(stack, k, b);
  Eigen::VectorXd out = x.data();
  detail::post_smooth(level, out, b.data(), lambda, steps, variant);
  return PairField(level.space, std::move(out));
}

namespace {
double energy_norm_impl(const LevelStack &stack, int k, const PairField &x, Variant v) {
  const Level &level = level_of(stack, k, x);
  const Eigen::VectorXd bx = detail::apply_op(level, x.data(), v);
  const double val = level.ops->d() * bx.dot(level.precond.apply(bx));
  return std::sqrt(std::max(val, 0.0));
}
} // namespace

double energy_norm(const LevelStack &stack, int k, const PairField &x) {
  return energy_norm_impl(stack, k, x, Variant::primal);
}

double energy_norm_dual(const LevelStack &stack, int k, const PairField &x) {
  return energy_norm_impl(stack, k, x, Variant::dual);
}

double energy_norm_0(const PairField &x) { return std::sqrt(pair_inner_product(x, x)); }

SaddleMultigrid::SaddleMultigrid(std::shared_ptr<const LevelStack> stack, CycleConfig config)
    : stack_(std::move(stack)), config_(config) {
  config_.validate();
  auto eigs = std::make_shared<std::vector<EigEstimate>>();
  for (int k = 0; k <= stack_->max_level(); ++k) {
    eigs->push_back(estimate_extreme_eigs(*stack_, k, config_.variant, config_.max_power_iters, config_.power_tol));
    damping_.push_back(damping_factor(*stack_, k, eigs->back(), config_.damping_constant_C, config_.smoothing_weight));
  }
  eigs_ = std::move(eigs);

  const auto &ops0 = *stack_->level(0).ops;
  Eigen::MatrixXd G0 = config_.variant == Variant::primal ? Eigen::MatrixXd(ops0.G) : Eigen::MatrixXd(ops0.Gt);
  Eigen::FullPivLU<Eigen::MatrixXd> check(G0);
  if (!check.isInvertible())
    throw NumericalError("level-0 saddle matrix is singular");
  coarse_ = std::make_shared<const Eigen::PartialPivLU<Eigen::MatrixXd>>(G0);
}

SaddleMultigrid SaddleMultigrid::with_smoothing(int m1, int m2) const {
  SaddleMultigrid copy = *this;
  copy.config_.m1 = m1;
  copy.config_.m2 = m2;
  copy.config_.validate();
  return copy;
}

Eigen::VectorXd SaddleMultigrid::coarse_solve(const Eigen::VectorXd &b) const {
  return coarse_->solve(stack_->level(0).ops->d() * b);
}

Eigen::VectorXd SaddleMultigrid::cycle(int k, const Eigen::VectorXd &b, Eigen::VectorXd x) const {
  if (k == 0)
    return coarse_solve(b);
  const Level &level = stack_->level(k);
  const Variant v = config_.variant;

  detail::pre_smooth(level, x, b, damping_[k], config_.m1, v);

  const Eigen::VectorXd coarse_b = restrict_stacked(*stack_, k, b - detail::apply_op(level, x, v));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(coarse_b.size());
  Eigen::VectorXd correction = cycle(k - 1, coarse_b, zero);
  if (config_.cycle == CycleKind::W)
    correction = cycle(k - 1, coarse_b, std::move(correction));
  x += inject_stacked(*stack_, k, correction);

  detail::post_smooth(level, x, b, damping_[k], config_.m2, v);
  return x;
}

PairField SaddleMultigrid::mg_solve(int k, const PairField &b, const PairField &x0) const {
  const Level &level = level_of(*stack_, k, b);
  level_of(*stack_, k, x0);
  return PairField(level.space, cycle(k, b.data(), x0.data()));
}

SolveReport SaddleMultigrid::solve(int k, const PairField &b, const PairField &x0, double rtol,
                                   int max_cycles) const {
  const Level &level = level_of(*stack_, k, b);
  level_of(*stack_, k, x0);
  SolveReport report;
  report.x = x0.data();
  const double bnorm = b.data().norm();
  auto residual = [&] {
    const double r = (b.data() - detail::apply_op(level, report.x, config_.variant)).norm();
    return bnorm > 0.0 ? r / bnorm : r;
  };
  report.relative_residual = residual();
  report.history.push_back(report.relative_residual);
  while (report.relative_residual > rtol && report.cycles < max_cycles) {
    report.x = cycle(k, b.data(), std::move(report.x));
    ++report.cycles;
    report.relative_residual = residual();
    report.history.push_back(report.relative_residual);
  }
  report.converged = report.relative_residual <= rtol;
  return report;
}

PairField mg_solve(const SaddleMultigrid &mg, int k, const PairField &b, const PairField &x0) {
  return mg.mg_solve(k, b, x0);
}

} // namespace dgmg
