// Acceptance gate. Usage: acceptance <criterion>, one of 1a 1b 1c 1d 2 3 4 5 6.
// Prints one PASS/FAIL line per checked item and exits nonzero if any failed.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "dgmg/bench.hpp"

using namespace dgmg;

namespace {

int failures = 0;

void report(bool ok, const std::string &id, const std::string &detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << id << " " << detail << std::endl;
  if (!ok)
    ++failures;
}

std::string fmt(const char *f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::vector<double> kBetas{1e-2, 1e-4, 1e-6};
const std::vector<int> kMs{1, 2, 4, 8, 16, 32, 64};

void identities(const std::string &id, const std::vector<std::string> &names) {
  const auto results = run_property_suite(PropertySuiteOptions{});
  for (const auto &name : names) {
    const auto it = std::find_if(results.begin(), results.end(), [&](const auto &r) { return r.name == name; });
    if (it == results.end()) {
      report(false, id, name + ": not run");
      continue;
    }
    report(it->passed, id, name + ": max relative error " + fmt("%.3e", it->max_error) + " (tol " +
                               fmt("%.0e", it->tolerance) + ")");
  }
}

void spectral_bounds() {
  // The power-iteration values drive the damping and are shown for reference; the
  // criterion is judged on Lanczos extremes because the shifted power iteration
  // stalls above the true lambda_min on fine levels.
  const auto power = eig_report(Domain::unit_square, kBetas, 5, 6.0, 2000, EigMethod::power);
  const auto rows = eig_report(Domain::unit_square, kBetas, 5, 6.0, 2000, EigMethod::lanczos);
  double min_lo = INFINITY, min_hi = 0.0, max_lo = INFINITY, max_hi = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto &r = rows[i];
    std::cout << "  beta=" << fmt("%.0e", r.beta) << " k=" << r.k << " lambda_min=" << fmt("%.4e", r.eig.lambda_min)
              << " lambda_max/(q+1)=" << fmt("%.4e", r.scaled_max) << (r.eig.converged ? "" : " (unconverged)")
              << "  power: " << fmt("%.4e", power[i].eig.lambda_min) << " " << fmt("%.4e", power[i].scaled_max)
              << "\n";
    min_lo = std::min(min_lo, r.eig.lambda_min);
    min_hi = std::max(min_hi, r.eig.lambda_min);
    max_lo = std::min(max_lo, r.scaled_max);
    max_hi = std::max(max_hi, r.scaled_max);
  }
  report(min_lo > 0.0, "2", "c_min = " + fmt("%.4e", min_lo) + " > 0");
  report(min_hi / min_lo < 5.0, "2", "lambda_min spread " + fmt("%.3g", min_hi / min_lo) + " < 5");
  report(max_hi / max_lo < 5.0, "2", "lambda_max/(q+1) spread " + fmt("%.3g", max_hi / max_lo) + " < 5");
}

void convergence_rates() {
  const auto rows = convergence_study(Domain::unit_square, 1e-2, 5, 1);
  write_rates(std::cout, rows);
  const auto &a = rows[rows.size() - 2], &b = rows.back();
  const double l2p = std::log2(a.p.l2 / b.p.l2), l2y = std::log2(a.y.l2 / b.y.l2);
  const double ehp = std::log2(a.p.one_h / b.p.one_h), ehy = std::log2(a.y.one_h / b.y.one_h);
  report(l2p >= 1.8 && l2p <= 2.2, "3", "L2 order of p " + fmt("%.3f", l2p) + " in [1.8, 2.2]");
  report(l2y >= 1.8 && l2y <= 2.2, "3", "L2 order of y " + fmt("%.3f", l2y) + " in [1.8, 2.2]");
  report(ehp >= 0.8 && ehp <= 1.2, "3", "energy order of p " + fmt("%.3f", ehp) + " in [0.8, 1.2]");
  report(ehy >= 0.8 && ehy <= 1.2, "3", "energy order of y " + fmt("%.3f", ehy) + " in [0.8, 1.2]");
}

ContractionTable table(Domain domain, CycleKind cycle, const std::vector<int> &ms) {
  ExperimentConfig cfg;
  cfg.domain = domain;
  cfg.betas = kBetas;
  cfg.levels = 5;
  cfg.m_values = ms;
  cfg.cycle = cycle;
  const auto t = run_table(cfg);
  write_table_text(std::cout, t);
  return t;
}

double indicator(Domain domain, double beta, int k) {
  const double h = build_initial_mesh(domain).h_max() / std::pow(2.0, k);
  return std::sqrt(beta) / (h * h);
}

void table_trends(Domain domain, const std::string &id, double scaling_limit, bool reference_row) {
  const auto t = table(domain, CycleKind::W, kMs);

  double worst = 0.0;
  for (const auto &c : t.cells)
    if (c.m >= 4)
      worst = std::max(worst, c.contraction);
  report(worst < 1.0, id + "a", "max contraction for m >= 4 is " + fmt("%.3e", worst) + " < 1");

  if (reference_row) {
    const double reference[] = {8.49e-01, 7.36e-01, 5.63e-01, 3.71e-01, 1.95e-01, 9.95e-02, 4.59e-02};
    for (std::size_t i = 0; i < kMs.size(); ++i) {
      const double v = *t.value(1e-2, 5, kMs[i]);
      report(std::abs(v - reference[i]) <= 0.15, id + "b",
             "beta=1e-2 k=5 m=" + std::to_string(kMs[i]) + ": " + fmt("%.3e", v) + " vs " + fmt("%.3e", reference[i]) +
                 " (+-0.15)");
    }
  }

  for (double beta : kBetas)
    for (int k = 1; k <= 5; ++k) {
      if (indicator(domain, beta, k) < 1.0)
        continue;
      for (int m : {8, 16, 32}) {
        const double r = *t.value(beta, k, 2 * m) / *t.value(beta, k, m);
        report(r <= scaling_limit, id + "c",
               "beta=" + fmt("%.0e", beta) + " k=" + std::to_string(k) + " contraction(" + std::to_string(2 * m) +
                   ")/contraction(" + std::to_string(m) + ") = " + fmt("%.3f", r) + " <= " +
                   fmt("%.1f", scaling_limit));
      }
    }

  double robust = 0.0;
  for (double beta : kBetas)
    for (int k = 3; k <= 5; ++k)
      robust = std::max(robust, *t.value(beta, k, 16));
  report(robust <= 0.5, id + "d", "max over beta and k in 3..5 at m=16 is " + fmt("%.3e", robust) + " <= 0.5");
}

void vcycle() {
  const auto t = table(Domain::unit_square, CycleKind::V, {4});
  for (const auto &c : t.cells)
    report(c.contraction < 0.85, "5",
           "V-cycle beta=" + fmt("%.0e", c.beta) + " k=" + std::to_string(c.k) + " m=4 contraction " +
               fmt("%.3e", c.contraction) + " < 0.85");
  for (double beta : kBetas) {
    ProblemParams p;
    p.beta = beta;
    auto stack = build_hierarchy(Domain::unit_square, 5, p);
    CycleConfig cc;
    cc.m1 = cc.m2 = 4;
    cc.cycle = CycleKind::V;
    SaddleMultigrid mg(stack, cc);
    for (int k = 1; k <= 5; ++k) {
      const auto &sp = stack->level(k).space;
      const PairField b = load_functional(sp, [](const Vec2 &x) { return 1.0 + x.x() * x.y(); }, beta);
      const SolveReport r = mg.solve(k, b, PairField(sp), 1e-10, 100);
      report(r.converged, "5",
             "V-cycle solve beta=" + fmt("%.0e", beta) + " k=" + std::to_string(k) + ": relative residual " +
                 fmt("%.2e", r.relative_residual) + " after " + std::to_string(r.cycles) + " cycles");
    }
  }
}

} // namespace

int main(int argc, char **argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <1a|1b|1c|1d|2|3|4|5|6>\n";
    return 2;
  }
  const std::string c = argv[1];
  try {
    if (c == "1a")
      identities("1a", {"coercivity identity", "parallelogram identity"});
    else if (c == "1b")
      identities("1b", {"advection identity"});
    else if (c == "1c")
      identities("1c", {"transfer adjointness", "saddle transpose"});
    else if (c == "1d")
      identities("1d", {"projection identity (primal)", "projection identity (dual)", "smoother adjoint relation"});
    else if (c == "2")
      spectral_bounds();
    else if (c == "3")
      convergence_rates();
    else if (c == "4")
      table_trends(Domain::unit_square, "4", 0.7, true);
    else if (c == "5")
      vcycle();
    else if (c == "6")
      table_trends(Domain::l_shaped, "6/4", 0.8, false);
    else {
      std::cerr << "unknown criterion " << c << "\n";
      return 2;
    }
  } catch (const std::exception &e) {
    report(false, c, std::string("exception: ") + e.what());
  }
  return failures == 0 ? 0 : 1;
}
