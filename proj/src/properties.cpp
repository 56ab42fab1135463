// Exact algebraic identities of the discretization and the multigrid building
// blocks, checked on seeded random inputs.
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <random>

#include "dgmg/bench.hpp"
#include "dgmg/errors.hpp"
#include "dgmg/quadrature.hpp"

namespace dgmg {

namespace {

double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

struct Acc {
  std::string name;
  double tol;
  double worst = 0.0;
  void add(double e) { worst = std::max(worst, std::isfinite(e) ? e : INFINITY); }
  PropertyResult result() const { return {name, worst, tol, worst <= tol}; }
};

// Right-hand side of the advection identity by direct quadrature of the traces.
double advection_identity_rhs(const ScalarField &v, const Coefficients &coef) {
  const DgSpace &space = v.space();
  const Mesh &mesh = space.mesh();
  double vol = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (const auto &q : quad::triangle_rule()) {
      const Vec2 x = space.map_point(t, q.bary);
      const double val = v.value(t, x);
      vol += q.weight * space.area(t) * (coef.gamma(x) - 0.5 * coef.div_zeta(x)) * val * val;
    }
  double bnd = 0.0;
  for (const auto &e : mesh.edges()) {
    if (!e.on_boundary())
      continue;
    const Vec2 a = mesh.vertices()[e.endpoints[0]];
    const Vec2 b = mesh.vertices()[e.endpoints[1]];
    for (const auto &q : quad::edge_rule()) {
      const Vec2 x = a + q.s * (b - a);
      const double val = v.value(e.plus_element, x);
      bnd += q.weight * e.length * std::abs(coef.zeta(x).dot(e.normal)) * val * val;
    }
  }
  return vol + 0.5 * bnd;
}

Eigen::MatrixXd dense(const SparseMatrix &m) { return Eigen::MatrixXd(m); }

} // namespace

std::vector<PropertyResult> run_property_suite(const PropertySuiteOptions &opt) {
  if (opt.min_level < 1 || opt.max_level < opt.min_level || opt.samples < 1)
    throw ConfigError("property suite: need 1 <= min_level <= max_level and samples >= 1");
  const double tol = opt.tolerance;
  Acc coer{"coercivity identity", tol}, para{"parallelogram identity", tol}, adv{"advection identity", tol},
      transfer{"transfer adjointness", tol}, transp{"saddle transpose", tol},
      proj{"projection identity (primal)", tol}, projd{"projection identity (dual)", tol},
      duality{"smoother adjoint relation", tol};

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  auto randv = [&](int n) {
    Eigen::VectorXd v(n);
    for (auto &x : v)
      x = nd(rng);
    return v;
  };

  for (double beta : opt.betas) {
    ProblemParams params;
    params.beta = beta;
    auto stack = build_hierarchy(Domain::unit_square, opt.max_level, params);
    const double sb = std::sqrt(beta);
    for (int k = opt.min_level; k <= opt.max_level; ++k) {
      const Level &L = stack->level(k);
      const Level &Lc = stack->level(k - 1);
      const auto &ops = *L.ops;
      const int n = L.space->dof_count();
      const int nc = Lc.space->dof_count();

      // dense coarse Galerkin systems for the variational projections
      const Eigen::PartialPivLU<Eigen::MatrixXd> luG(dense(Lc.ops->G));
      const Eigen::PartialPivLU<Eigen::MatrixXd> luGt(dense(Lc.ops->Gt));
      const SparseMatrix &P = stack->injection(k);
      auto block_Pt = [&](const Eigen::VectorXd &v) {
        Eigen::VectorXd r(2 * nc);
        r << P.transpose() * v.head(n), P.transpose() * v.tail(n);
        return r;
      };

      // power estimate of lambda_max for a representative damping factor
      const EigEstimate eig = estimate_extreme_eigs(*stack, k, Variant::primal, 30, 1e-3);
      const double lambda = 1.0 / eig.lambda_max;

      for (int s = 0; s < opt.samples; ++s) {
        const PairField x(L.space, randv(2 * n));
        const PairField w(L.space, randv(2 * n));
        const Eigen::VectorXd p = x.p(), y = x.y();

        // B_h((p,y),(p-y,-y-p)) = s a(p,p) + |p|^2 + s a(y,y) + |y|^2
        Eigen::VectorXd test(2 * n);
        test << p - y, -y - p;
        const double lhs = L.saddle.form(x, PairField(L.space, test));
        const double rhs = sb * p.dot(ops.A * p) + p.dot(ops.M * p) + sb * y.dot(ops.A * y) + y.dot(ops.M * y);
        coer.add(rel(lhs, rhs));

        const ScalarField pf(L.space, p), yf(L.space, y);
        const ScalarField dm(L.space, p - y), dp(L.space, -y - p);
        const double a1 = std::pow(norm_h1beta(dm, beta), 2) + std::pow(norm_h1beta(dp, beta), 2);
        const double a2 = 2.0 * (std::pow(norm_h1beta(pf, beta), 2) + std::pow(norm_h1beta(yf, beta), 2));
        para.add(rel(a1, a2));

        adv.add(rel(p.dot(ops.A_ar * p), advection_identity_rhs(pf, ops.coef)));

        const PairField wc(Lc.space, randv(2 * nc));
        transfer.add(rel(pair_inner_product(restrict_to_coarse(*stack, k, x), wc),
                         pair_inner_product(x, inject(*stack, k, wc))));

        transp.add(rel(pair_inner_product(L.saddle.apply(x), w), pair_inner_product(x, L.saddle.apply_transpose(w))));

        // P^{k-1}_k I^k_{k-1} w = w, with B_{k-1}(P x, v) = B_k(x, I v) for all coarse v
        const Eigen::VectorXd Iw = inject_stacked(*stack, k, wc.data());
        const Eigen::VectorXd z = luG.solve(block_Pt(ops.G * Iw));
        proj.add((z - wc.data()).norm() / wc.data().norm());
        const Eigen::VectorXd zd = luGt.solve(block_Pt(ops.Gt * Iw));
        projd.add((zd - wc.data()).norm() / wc.data().norm());

        // B(S x, w) = B(x, R~ w), S = I - lambda C^{-1} B^t B, R~ = I - lambda B C^{-1} B^t
        const Eigen::VectorXd Sx =
            x.data() - lambda * L.precond.apply(L.saddle.apply_transpose(L.saddle.apply(x.data())));
        const Eigen::VectorXd Rw =
            w.data() - lambda * L.saddle.apply(L.precond.apply(L.saddle.apply_transpose(w.data())));
        duality.add(rel(L.saddle.form(PairField(L.space, Sx), w), L.saddle.form(x, PairField(L.space, Rw))));
      }
    }
  }
  return {coer.result(),     para.result(), adv.result(),  transfer.result(),
          transp.result(),   proj.result(), projd.result(), duality.result()};
}

} // namespace dgmg
