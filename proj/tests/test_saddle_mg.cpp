#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

#include "dgmg/errors.hpp"
#include "helpers.hpp"

using namespace dgmg;

namespace {

CycleConfig config(int m, CycleKind kind = CycleKind::W, Variant v = Variant::primal) {
  CycleConfig c;
  c.m1 = c.m2 = m;
  c.cycle = kind;
  c.variant = v;
  return c;
}

Eigen::VectorXd direct_solve(const LevelOperators &ops, const Eigen::VectorXd &b, Variant v) {
  const Eigen::MatrixXd G = v == Variant::primal ? Eigen::MatrixXd(ops.G) : Eigen::MatrixXd(ops.Gt);
  return G.partialPivLu().solve(ops.d() * b);
}

} // namespace

TEST_SUITE("saddle_mg") {

TEST_CASE("level-0 eigenvalue estimates match a dense eigensolve") {
  for (double beta : {1e-2, 1e-4, 1e-6}) {
    auto s = testutil::square_stack(0, beta);
    const Level &lv = s->level(0);
    const int n = 2 * lv.space->dof_count();
    Eigen::MatrixXd T(n, n);
    for (int j = 0; j < n; ++j)
      T.col(j) = detail::apply_normal(lv, Eigen::VectorXd::Unit(n, j), Variant::primal);
    CHECK((T - T.transpose()).cwiseAbs().maxCoeff() < 1e-10 * T.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (T + T.transpose()));
    const EigEstimate e = estimate_extreme_eigs(*s, 0, Variant::primal, 100000, 1e-13);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK(testutil::rel_diff(e.lambda_max, es.eigenvalues().maxCoeff()) < 1e-4);
    CHECK(testutil::rel_diff(e.lambda_min, es.eigenvalues().minCoeff()) < 1e-4);
    const EigEstimate ed = estimate_extreme_eigs(*s, 0, Variant::dual, 100000, 1e-13);
    CHECK(testutil::rel_diff(ed.lambda_max, es.eigenvalues().maxCoeff()) < 1e-4);
    const EigEstimate el = lanczos_extreme_eigs(*s, 0);
    CHECK(el.converged);
    CHECK(testutil::rel_diff(el.lambda_max, es.eigenvalues().maxCoeff()) < 1e-8);
    CHECK(testutil::rel_diff(el.lambda_min, es.eigenvalues().minCoeff()) < 1e-8);
  }
}

TEST_CASE("Lanczos extremes bracket the power-iteration estimates") {
  auto s = testutil::square_stack(3, 1e-2);
  for (int k = 1; k <= 3; ++k) {
    const EigEstimate p = estimate_extreme_eigs(*s, k);
    const EigEstimate l = lanczos_extreme_eigs(*s, k);
    CHECK(l.converged);
    // Rayleigh quotients never leave the spectrum
    CHECK(p.lambda_max <= l.lambda_max * (1.0 + 1e-10));
    CHECK(p.lambda_min >= l.lambda_min * (1.0 - 1e-10));
    CHECK(testutil::rel_diff(p.lambda_max, l.lambda_max) < 1e-3);
  }
}

TEST_CASE("estimates are positive and lambda_max scales with the level indicator") {
  auto s = testutil::square_stack(5, 1e-2);
  SaddleMultigrid mg(s, config(1));
  for (int k = 0; k <= 5; ++k) {
    CHECK(mg.eig(k).lambda_min > 0.0);
    CHECK(mg.eig(k).lambda_min <= mg.eig(k).lambda_max);
    CHECK(mg.eig(k).level == k);
  }
  for (int k = 4; k <= 5; ++k) {
    REQUIRE(level_indicator(*s, k - 1) >= 1.0);
    const double ratio = mg.eig(k).lambda_max / mg.eig(k - 1).lambda_max;
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.3));
  }
}

TEST_CASE("eigenvalue estimates are reproducible") {
  auto s = testutil::square_stack(3, 1e-4);
  SaddleMultigrid a(s, config(2)), b(s, config(2));
  for (int k = 0; k <= 3; ++k) {
    CHECK(a.eig(k).lambda_max == b.eig(k).lambda_max);
    CHECK(a.eig(k).lambda_min == b.eig(k).lambda_min);
    CHECK(a.damping(k) == b.damping(k));
  }
  const SaddleMultigrid c = a.with_smoothing(5, 5);
  CHECK(c.config().m1 == 5);
  CHECK(c.eig(3).lambda_max == a.eig(3).lambda_max);
}

TEST_CASE("damping factor branches") {
  auto s = testutil::square_stack(5, 1e-2);
  CHECK(level_indicator(*s, 0) == doctest::Approx(0.05));
  CHECK(level_indicator(*s, 5) == doctest::Approx(51.2));
  EigEstimate e;
  e.lambda_min = 0.5;
  e.lambda_max = 1.5;
  CHECK(damping_factor(*s, 0, e) == doctest::Approx(1.0));
  e.lambda_max = 612.0;
  e.lambda_min = 1.0;
  const double with_unit_weight = damping_factor(*s, 5, e, 1.0, 1.0);
  CHECK(with_unit_weight * e.lambda_max <= 1.0 + 1e-15);
  CHECK(with_unit_weight == doctest::Approx(1.0 / 612.0));
  CHECK(damping_factor(*s, 5, e) * e.lambda_max == doctest::Approx(4.0 / 3.0));
  e.lambda_max = 1.0;
  CHECK(damping_factor(*s, 5, e, 1.0, 1.0) == doctest::Approx(1.0 / 52.2));
}

TEST_CASE("cycle configuration validation") {
  auto s = testutil::square_stack(1, 1e-2);
  CycleConfig c = config(0);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(SaddleMultigrid(s, c), ConfigError);
  c.m1 = -1;
  c.m2 = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config(1);
  c.m2 = 0;
  CHECK_NOTHROW(c.validate());
  c.smoothing_weight = 2.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.smoothing_weight = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("smoothers") {
  std::mt19937_64 rng(17);
  auto s = testutil::square_stack(3, 1e-2);
  SaddleMultigrid mg(s, config(1));
  for (int k = 1; k <= 3; ++k) {
    const Level &lv = s->level(k);
    const int n = 2 * lv.space->dof_count();
    const double lambda = mg.damping(k);
    const PairField xs(lv.space, testutil::random_vector(n, rng));
    const PairField b = lv.saddle.apply(xs);
    for (Variant v : {Variant::primal, Variant::dual}) {
      const PairField bv = v == Variant::primal ? b : lv.saddle.apply_transpose(xs);
      CHECK((smooth_pre(*s, k, xs, bv, lambda, 3, v).data() - xs.data()).norm() <= 1e-13 * xs.data().norm());
      CHECK((smooth_post(*s, k, xs, bv, lambda, 3, v).data() - xs.data()).norm() <= 1e-13 * xs.data().norm());
    }

    const PairField zero(lv.space);
    const PairField pre = smooth_pre(*s, k, zero, b, lambda, 1);
    const PairField pre_oracle = lambda * lv.precond.apply_Ck_inverse(lv.saddle.apply_transpose(b));
    CHECK((pre.data() - pre_oracle.data()).norm() <= 1e-13 * pre_oracle.data().norm());
    const PairField post = smooth_post(*s, k, zero, b, lambda, 1);
    const PairField post_oracle = lambda * lv.saddle.apply_transpose(lv.precond.apply_Ck_inverse(b));
    CHECK((post.data() - post_oracle.data()).norm() <= 1e-13 * post_oracle.data().norm());
    const PairField dual_pre = smooth_pre(*s, k, zero, b, lambda, 1, Variant::dual);
    const PairField dual_oracle = lambda * lv.precond.apply_Ck_inverse(lv.saddle.apply(b));
    CHECK((dual_pre.data() - dual_oracle.data()).norm() <= 1e-13 * dual_oracle.data().norm());
  }
}

TEST_CASE("smoothing does not increase the energy error") {
  std::mt19937_64 rng(19);
  for (double beta : {1e-2, 1e-6}) {
    auto s = testutil::square_stack(3, beta);
    SaddleMultigrid mg(s, config(1));
    for (int k = 1; k <= 3; ++k) {
      const Level &lv = s->level(k);
      const int n = 2 * lv.space->dof_count();
      const PairField b(lv.space, testutil::random_vector(n, rng));
      const PairField xs(lv.space, direct_solve(*lv.ops, b.data(), Variant::primal));
      for (bool pre : {true, false}) {
        PairField x(lv.space, testutil::random_vector(n, rng));
        double prev = energy_norm(*s, k, x - xs);
        const double first = prev;
        for (int j = 0; j < 10; ++j) {
          x = pre ? smooth_pre(*s, k, x, b, mg.damping(k), 1) : smooth_post(*s, k, x, b, mg.damping(k), 1);
          const double cur = energy_norm(*s, k, x - xs);
          CHECK(cur <= prev * (1.0 + 1e-12));
          prev = cur;
        }
        CHECK(prev < first);
      }
    }
  }
}

TEST_CASE("smoother adjoint relation") {
  std::mt19937_64 rng(23);
  auto s = testutil::square_stack(3, 1e-4);
  SaddleMultigrid mg(s, config(1));
  for (int k = 1; k <= 3; ++k) {
    const Level &lv = s->level(k);
    const int n = 2 * lv.space->dof_count();
    const PairField zero(lv.space);
    for (int i = 0; i < 10; ++i) {
      const PairField x(lv.space, testutil::random_vector(n, rng));
      const PairField y(lv.space, testutil::random_vector(n, rng));
      const PairField sx = smooth_pre(*s, k, x, zero, mg.damping(k), 1);
      const PairField ry = smooth_post(*s, k, y, zero, mg.damping(k), 1, Variant::dual);
      CHECK(testutil::rel_diff(lv.saddle.form(sx, y), lv.saddle.form(x, ry)) < 1e-11);
    }
  }
}

TEST_CASE("one cycle is affine in the initial guess") {
  std::mt19937_64 rng(29);
  auto s = testutil::square_stack(3, 1e-2);
  for (CycleKind kind : {CycleKind::W, CycleKind::V}) {
    SaddleMultigrid mg(s, config(2, kind));
    const auto &sp = s->level(3).space;
    const int n = 2 * sp->dof_count();
    const PairField zero(sp);
    CHECK(mg.mg_solve(3, zero, zero).data().norm() == 0.0);
    const PairField b(sp, testutil::random_vector(n, rng));
    const PairField x0(sp, testutil::random_vector(n, rng));
    const PairField x1(sp, testutil::random_vector(n, rng));
    const Eigen::VectorXd diff = mg.mg_solve(3, b, x0).data() - mg.mg_solve(3, b, x1).data();
    const Eigen::VectorXd lin = mg_solve(mg, 3, zero, x0 - x1).data();
    CHECK((diff - lin).norm() <= 1e-11 * lin.norm());
    CHECK_THROWS_AS(mg.mg_solve(3, PairField(s->level(2).space), x0), ContractViolation);
  }
}

TEST_CASE("level 0 is solved directly and the two-grid cycle contracts") {
  std::mt19937_64 rng(31);
  auto s = testutil::square_stack(1, 1e-2);
  SaddleMultigrid mg(s, config(1));
  const auto &s0 = s->level(0).space;
  const PairField b0(s0, testutil::random_vector(2 * s0->dof_count(), rng));
  const Eigen::VectorXd x0 = mg.mg_solve(0, b0, PairField(s0)).data();
  CHECK((x0 - direct_solve(*s->level(0).ops, b0.data(), Variant::primal)).norm() < 1e-12 * x0.norm());

  const auto &s1 = s->level(1).space;
  const PairField b(s1, testutil::random_vector(2 * s1->dof_count(), rng));
  const PairField xs(s1, direct_solve(*s->level(1).ops, b.data(), Variant::primal));
  for (int i = 0; i < 5; ++i) {
    const PairField x(s1, testutil::random_vector(2 * s1->dof_count(), rng));
    const double before = energy_norm(*s, 1, x - xs);
    const double after = energy_norm(*s, 1, mg.mg_solve(1, b, x) - xs);
    CHECK(after < before);
  }
}

TEST_CASE("iterated cycles reach the direct solution") {
  std::mt19937_64 rng(37);
  auto s = testutil::square_stack(4, 1e-4);
  for (Variant v : {Variant::primal, Variant::dual})
    for (CycleKind kind : {CycleKind::W, CycleKind::V}) {
      SaddleMultigrid mg(s, config(4, kind, v));
      const auto &sp = s->level(4).space;
      const PairField b(sp, testutil::random_vector(2 * sp->dof_count(), rng));
      const SolveReport r = mg.solve(4, b, PairField(sp));
      CHECK(r.converged);
      CHECK(r.relative_residual <= 1e-10);
      CHECK(r.cycles < 100);
      CHECK(r.history.size() == static_cast<std::size_t>(r.cycles + 1));
      const Eigen::VectorXd xs = direct_solve(*s->level(4).ops, b.data(), v);
      CHECK((r.x - xs).norm() < 1e-7 * xs.norm());
    }
}

TEST_CASE("dual cycles contract like primal cycles") {
  auto s = testutil::square_stack(4, 1e-2);
  for (int m : {2, 8}) {
    SaddleMultigrid primal(s, config(m)), dual(s, config(m, CycleKind::W, Variant::dual));
    const double cp = measure_contraction(primal, 4, 1).contraction;
    const double cd = measure_contraction(dual, 4, 1).contraction;
    CHECK(cd == doctest::Approx(cp).epsilon(0.15));
  }
}

TEST_CASE("energy norms") {
  std::mt19937_64 rng(41);
  double lo = INFINITY, hi = 0.0;
  for (double beta : {1.0, 1e-2, 1e-6}) {
    auto s = testutil::square_stack(3, beta);
    for (int k = 0; k <= 3; ++k) {
      const auto &sp = s->level(k).space;
      const PairField zero(sp);
      CHECK(energy_norm(*s, k, zero) == 0.0);
      CHECK(energy_norm_dual(*s, k, zero) == 0.0);
      CHECK(energy_norm_0(zero) == 0.0);
      for (int i = 0; i < 5; ++i) {
        const PairField x(sp, testutil::random_vector(2 * sp->dof_count(), rng));
        const double ref = std::hypot(norm_h1beta(x.p_field(), beta), norm_h1beta(x.y_field(), beta));
        const double r = energy_norm(*s, k, x) / ref;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        CHECK(energy_norm_dual(*s, k, x) > 0.0);
        const double l2 = std::hypot(l2_norm(x.p_field()), l2_norm(x.y_field()));
        const double r0 = energy_norm_0(x) / l2;
        CHECK(r0 >= std::sqrt(12.0) - 1e-12);
        CHECK(r0 <= std::sqrt(48.0) + 1e-12);
      }
    }
  }
  MESSAGE("energy norm / H1_beta ratio in [" << lo << ", " << hi << "]");
  CHECK(lo > 0.5);
  CHECK(hi < 2.0);
}

}
