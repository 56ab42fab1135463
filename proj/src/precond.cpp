#include "dgmg/precond.hpp"

#include <cmath>
#include <random>

#include "dgmg/errors.hpp"

namespace dgmg {

namespace {

// Largest eigenvalue of diag(K)^{-1} K via its symmetric form D^{-1/2} K D^{-1/2}.
double jacobi_spectral_radius(const SparseMatrix &K, const Eigen::VectorXd &inv_sqrt_diag, int iters) {
  std::mt19937_64 rng(20240521);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(K.rows());
  for (auto &x : v)
    x = dist(rng);
  v.normalize();
  double rho = 0.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd w = inv_sqrt_diag.cwiseProduct(K * inv_sqrt_diag.cwiseProduct(v));
    const double next = v.dot(w);
    v = w.normalized();
    if (it > 0 && std::abs(next - rho) < 1e-8 * std::abs(next)) {
      rho = next;
      break;
    }
    rho = next;
  }
  return rho;
}

} // namespace

ReactionDiffusionMultigrid::ReactionDiffusionMultigrid(std::vector<SparseMatrix> matrices,
                                                       std::vector<SparseMatrix> injections,
                                                       PrecondOptions options)
    : K_(std::move(matrices)), P_(std::move(injections)), options_(options) {
  if (K_.empty() || P_.size() != K_.size())
    throw ContractViolation("ReactionDiffusionMultigrid: need one injection slot per level");
  if (options_.inner_cycles < 1 || options_.inner_smoothing < 1)
    throw ConfigError("inner multigrid needs at least one cycle and one smoothing sweep");

  Pt_.resize(P_.size());
  for (std::size_t k = 1; k < P_.size(); ++k)
    Pt_[k] = P_[k].transpose();

  if (options_.galerkin_coarse)
    for (std::size_t k = K_.size() - 1; k >= 1; --k)
      K_[k - 1] = SparseMatrix(Pt_[k] * K_[k] * P_[k]);

  for (const auto &K : K_) {
    const Eigen::VectorXd diag = K.diagonal();
    const double rho = jacobi_spectral_radius(K, diag.cwiseSqrt().cwiseInverse(), options_.jacobi_power_iters);
    const double w = 2.0 / (3.0 * rho);
    weight_.push_back(w);
    scaled_inv_diag_.push_back(w * diag.cwiseInverse());
  }

  if (options_.exact)
    for (const auto &K : K_) {
      auto f = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(Eigen::SparseMatrix<double>(K));
      if (f->info() != Eigen::Success)
        throw NumericalError("reaction-diffusion matrix factorization failed");
      exact_.push_back(std::move(f));
    }

  coarse_.compute(Eigen::MatrixXd(K_[0]));
  if (coarse_.info() != Eigen::Success)
    throw NumericalError("level-0 reaction-diffusion matrix is not positive definite");
}

void ReactionDiffusionMultigrid::smooth(int k, const Eigen::MatrixXd &rhs, Eigen::MatrixXd &u,
                                        bool zero_guess) const {
  const auto Dinv = scaled_inv_diag_[k].asDiagonal();
  int sweeps = options_.inner_smoothing;
  if (zero_guess) {
    u = Dinv * rhs;
    --sweeps;
  }
  for (int s = 0; s < sweeps; ++s)
    u += Dinv * (rhs - K_[k] * u);
}

void ReactionDiffusionMultigrid::gauss_seidel(int k, const Eigen::MatrixXd &rhs, Eigen::MatrixXd &u,
                                              bool forward) const {
  const SparseMatrix &K = K_[k];
  const int n = static_cast<int>(K.rows());
  const int cols = static_cast<int>(rhs.cols());
  for (int s = 0; s < options_.inner_smoothing; ++s)
    for (int step = 0; step < n; ++step) {
      const int i = forward ? step : n - 1 - step;
      double diag = 0.0;
      for (int c = 0; c < cols; ++c) {
        double acc = rhs(i, c);
        for (SparseMatrix::InnerIterator it(K, i); it; ++it) {
          if (it.col() == i)
            diag = it.value();
          else
            acc -= it.value() * u(it.col(), c);
        }
        u(i, c) = acc / diag;
      }
    }
}

Eigen::MatrixXd ReactionDiffusionMultigrid::vcycle(int k, const Eigen::MatrixXd &rhs) const {
  if (k == 0)
    return coarse_.solve(rhs);
  const bool gs = options_.smoother == InnerSmoother::gauss_seidel;
  Eigen::MatrixXd u;
  if (gs) {
    u = Eigen::MatrixXd::Zero(rhs.rows(), rhs.cols());
    gauss_seidel(k, rhs, u, true);
  } else {
    smooth(k, rhs, u, true);
  }
  const Eigen::MatrixXd coarse_rhs = Pt_[k] * (rhs - K_[k] * u);
  u += P_[k] * vcycle(k - 1, coarse_rhs);
  if (gs)
    gauss_seidel(k, rhs, u, false);
  else
    smooth(k, rhs, u, false);
  return u;
}

Eigen::MatrixXd ReactionDiffusionMultigrid::solve(int k, const Eigen::MatrixXd &rhs) const {
  if (k < 0 || k > max_level())
    throw ContractViolation("ReactionDiffusionMultigrid::solve: level out of range");
  if (options_.exact)
    return exact_[k]->solve(rhs);
  Eigen::MatrixXd u = vcycle(k, rhs);
  for (int c = 1; c < options_.inner_cycles; ++c)
    u += vcycle(k, rhs - K_[k] * u);
  return u;
}

BlockPreconditioner::BlockPreconditioner(std::shared_ptr<const ReactionDiffusionMultigrid> mg,
                                         std::shared_ptr<const DgSpace> space, int level)
    : mg_(std::move(mg)), space_(std::move(space)), level_(level) {}

ScalarField BlockPreconditioner::apply_Lk_inverse(const ScalarField &phi) const {
  if (phi.space_ptr() != space_)
    throw ContractViolation("apply_Lk_inverse: field on wrong level");
  const double d = space_->h() * space_->h();
  Eigen::VectorXd u = mg_->solve(level_, d * phi.coeffs());
  return ScalarField(space_, std::move(u));
}

Eigen::VectorXd BlockPreconditioner::apply(const Eigen::VectorXd &stacked) const {
  const int n = space_->dof_count();
  const double d = space_->h() * space_->h();
  // Both components share one two-column inner solve.
  const Eigen::Map<const Eigen::MatrixXd> cols(stacked.data(), n, 2);
  Eigen::MatrixXd u = mg_->solve(level_, d * cols);
  return Eigen::Map<Eigen::VectorXd>(u.data(), 2 * n);
}

PairField BlockPreconditioner::apply_Ck_inverse(const PairField &x) const {
  if (x.space_ptr() != space_)
    throw ContractViolation("apply_Ck_inverse: field on wrong level");
  return PairField(space_, apply(x.data()));
}

} // namespace dgmg
