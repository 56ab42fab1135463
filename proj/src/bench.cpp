#include "dgmg/bench.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "dgmg/errors.hpp"

#ifndef DGMG_VERSION
#define DGMG_VERSION "unknown"
#endif

namespace dgmg {

std::string version_string() { return DGMG_VERSION; }

namespace {

std::string sci3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cycle_name(CycleKind c) { return c == CycleKind::W ? "W" : "V"; }

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v[i] = dist(rng);
  return v;
}

} // namespace

ContractionResult measure_contraction(const SaddleMultigrid &mg, int k, std::uint64_t seed,
                                      const ContractionProtocol &protocol) {
  if (protocol.starts < 1 || protocol.max_cycles < 1 || protocol.stable_window < 1)
    throw ConfigError("contraction protocol needs starts, max_cycles and stable_window >= 1");
  const LevelStack &stack = mg.stack();
  const auto &space = stack.level(k).space;
  const int n2 = 2 * space->dof_count();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n2);

  ContractionResult best;
  for (int s = 0; s < protocol.starts; ++s) {
    Eigen::VectorXd x = random_vector(n2, seed * 1000003ULL + static_cast<std::uint64_t>(s) * 7919ULL + k);
    x /= energy_norm(stack, k, PairField(space, x));

    std::vector<double> ratios;
    ContractionResult r;
    r.flag = "unstable";
    for (int c = 1; c <= protocol.max_cycles; ++c) {
      Eigen::VectorXd y = mg.cycle(k, zero, x);
      const double e = energy_norm(stack, k, PairField(space, y));
      r.cycles_used = c;
      if (!(e > protocol.underflow)) {
        // error annihilated to rounding level; report the ratio as observed
        r.contraction = std::isfinite(e) ? e : 0.0;
        r.flag = "underflow";
        break;
      }
      ratios.push_back(e);
      r.contraction = e;
      const int nr = static_cast<int>(ratios.size());
      if (nr > protocol.stable_window) {
        bool stable = true;
        for (int j = nr - protocol.stable_window; j < nr; ++j)
          if (std::abs(ratios[j] - ratios[j - 1]) > protocol.stable_rel_change * ratios[j])
            stable = false;
        if (stable) {
          r.flag.clear();
          break;
        }
      }
      x = y / e;
    }
    if (s == 0 || r.contraction > best.contraction)
      best = r;
  }
  return best;
}

void ExperimentConfig::validate() const {
  if (betas.empty())
    throw ConfigError("at least one beta is required");
  for (double b : betas)
    if (!(b > 0.0))
      throw ConfigError("beta must be positive");
  if (!(sigma > 0.0))
    throw ConfigError("sigma must be positive");
  if (levels < 1 || levels > kMaxLevels)
    throw ConfigError("levels must be in [1, " + std::to_string(kMaxLevels) + "]");
  if (min_level < 1 || min_level > levels)
    throw ConfigError("min_level must be in [1, levels]");
  if (m_values.empty())
    throw ConfigError("at least one m is required");
  for (int m : m_values)
    if (m < 1)
      throw ConfigError("m must be >= 1");
}

std::optional<double> ContractionTable::value(double beta, int k, int m) const {
  for (const auto &c : cells)
    if (c.k == k && c.m == m && std::abs(c.beta - beta) <= 1e-12 * std::abs(beta))
      return c.contraction;
  return std::nullopt;
}

ContractionTable run_table(const ExperimentConfig &cfg, const ProgressFn &progress) {
  cfg.validate();
  ContractionTable table;
  table.domain = to_string(cfg.domain);
  table.sigma = cfg.sigma;
  table.cycle = cycle_name(cfg.cycle);
  table.seed = cfg.seed;
  table.version = version_string();

  for (double beta : cfg.betas) {
    ProblemParams params;
    params.beta = beta;
    params.sigma = cfg.sigma;
    auto stack = build_hierarchy(cfg.domain, cfg.levels, params, cfg.precond);
    CycleConfig cc;
    cc.cycle = cfg.cycle;
    const SaddleMultigrid base(stack, cc);
    for (int k = cfg.min_level; k <= cfg.levels; ++k) {
      for (int m : cfg.m_values) {
        const SaddleMultigrid mg = base.with_smoothing(m, m);
        const ContractionResult r = measure_contraction(mg, k, cfg.seed, cfg.protocol);
        TableCell cell{beta, k, m, r.contraction, r.cycles_used, r.flag};
        table.cells.push_back(cell);
        if (progress)
          progress(cell);
      }
    }
  }
  return table;
}

void write_table_text(std::ostream &os, const ContractionTable &table) {
  os << "# domain=" << table.domain << " sigma=" << table.sigma << " cycle=" << table.cycle
     << " seed=" << table.seed << " version=" << table.version << "\n";
  std::vector<double> betas;
  std::set<int> ms;
  for (const auto &c : table.cells) {
    if (std::find(betas.begin(), betas.end(), c.beta) == betas.end())
      betas.push_back(c.beta);
    ms.insert(c.m);
  }
  for (double beta : betas) {
    os << "\nbeta = " << sci3(beta) << "\n";
    std::string head = "   k";
    for (int m : ms) {
      char buf[16];
      std::snprintf(buf, sizeof buf, " %10s", ("m=" + std::to_string(m)).c_str());
      head += buf;
    }
    os << head << "\n";
    std::set<int> ks;
    for (const auto &c : table.cells)
      if (c.beta == beta)
        ks.insert(c.k);
    for (int k : ks) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%4d", k);
      os << buf;
      for (int m : ms) {
        auto v = table.value(beta, k, m);
        std::snprintf(buf, sizeof buf, " %10s", v ? sci3(*v).c_str() : "-");
        os << buf;
      }
      os << "\n";
    }
  }
}

void write_csv(std::ostream &os, const ContractionTable &table) {
  os << "# domain=" << table.domain << "\n";
  os << "# sigma=" << full(table.sigma) << "\n";
  os << "# cycle=" << table.cycle << "\n";
  os << "# seed=" << table.seed << "\n";
  os << "# version=" << table.version << "\n";
  os << "domain,beta,sigma,cycle,k,m,contraction,cycles_used,flag\n";
  for (const auto &c : table.cells)
    os << table.domain << ',' << full(c.beta) << ',' << full(table.sigma) << ',' << table.cycle << ',' << c.k << ','
       << c.m << ',' << full(c.contraction) << ',' << c.cycles_used << ',' << c.flag << "\n";
}

ContractionTable parse_csv(std::istream &is) {
  ContractionTable t;
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos)
        continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string val = line.substr(eq + 1);
      if (key == "domain")
        t.domain = val;
      else if (key == "sigma")
        t.sigma = std::stod(val);
      else if (key == "cycle")
        t.cycle = val;
      else if (key == "seed")
        t.seed = std::stoull(val);
      else if (key == "version")
        t.version = val;
      continue;
    }
    if (!header_seen) {
      if (line != "domain,beta,sigma,cycle,k,m,contraction,cycles_used,flag")
        throw ConfigError("csv: unexpected header at line " + std::to_string(lineno));
      header_seen = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ','))
      f.push_back(item);
    if (f.size() == 8 && !line.empty() && line.back() == ',')
      f.emplace_back();
    if (f.size() != 9)
      throw ConfigError("csv: expected 9 fields at line " + std::to_string(lineno));
    try {
      TableCell c;
      c.beta = std::stod(f[1]);
      c.k = std::stoi(f[4]);
      c.m = std::stoi(f[5]);
      c.contraction = std::stod(f[6]);
      c.cycles_used = std::stoi(f[7]);
      c.flag = f[8];
      t.cells.push_back(c);
    } catch (const std::logic_error &) {
      throw ConfigError("csv: bad number at line " + std::to_string(lineno));
    }
  }
  if (!header_seen)
    throw ConfigError("csv: missing header");
  return t;
}

std::vector<RateRow> convergence_study(Domain domain, double beta, int max_level, int min_level, double sigma) {
  if (min_level < 0 || max_level < min_level || max_level > kMaxLevels)
    throw ConfigError("convergence study: need 0 <= min_level <= max_level <= " + std::to_string(kMaxLevels));
  if (!(beta > 0.0))
    throw ConfigError("beta must be positive");
  const double w = domain == Domain::unit_square ? std::numbers::pi : 2.0 * std::numbers::pi;
  const double sb = std::sqrt(beta);
  auto s = [w](const Vec2 &x) { return std::sin(w * x.x()) * std::sin(w * x.y()); };
  auto grad = [w](const Vec2 &x) {
    return Vec2(w * std::cos(w * x.x()) * std::sin(w * x.y()), w * std::sin(w * x.x()) * std::cos(w * x.y()));
  };
  // p = y = s, zeta = (1, 0), gamma = 0:
  // f = sb (-lap p - dp/dx) - y,   g = -p - sb (-lap y + dy/dx)
  auto f = [&](const Vec2 &x) { return sb * (2 * w * w * s(x) - grad(x).x()) - s(x); };
  auto g = [&](const Vec2 &x) { return -s(x) - sb * (2 * w * w * s(x) + grad(x).x()); };

  ProblemParams params;
  params.beta = beta;
  params.sigma = sigma;

  std::vector<RateRow> rows;
  Mesh mesh = classify_edges(build_initial_mesh(domain), params.coef.zeta);
  for (int k = 0; k <= max_level; ++k) {
    if (k > 0)
      mesh = refine_uniform(mesh);
    if (k < min_level)
      continue;
    auto space = std::make_shared<const DgSpace>(std::make_shared<const Mesh>(mesh));
    auto ops = assemble_level(space, params);
    const int n = space->dof_count();
    Eigen::VectorXd rhs(2 * n);
    rhs << load_vector(*space, f), load_vector(*space, g);
    Eigen::SparseMatrix<double> G = ops->G;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(G);
    if (lu.info() != Eigen::Success)
      throw NumericalError("convergence study: sparse LU failed at level " + std::to_string(k));
    const Eigen::VectorXd x = lu.solve(rhs);
    PairField sol(space, x);
    RateRow row;
    row.k = k;
    row.h = space->h();
    row.p = error_norms(sol.p_field(), s, grad);
    row.y = error_norms(sol.y_field(), s, grad);
    if (!rows.empty()) {
      row.l2_rate = std::log2(rows.back().p.l2 / row.p.l2);
      row.one_h_rate = std::log2(rows.back().p.one_h / row.p.one_h);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_rates(std::ostream &os, const std::vector<RateRow> &rows) {
  os << "   k          h    L2(p)   rate   1,h(p)   rate    L2(y)   1,h(y)\n";
  for (const auto &r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%4d %10.3e %8.2e %6.2f %8.2e %6.2f %8.2e %8.2e\n", r.k, r.h, r.p.l2, r.l2_rate,
                  r.p.one_h, r.one_h_rate, r.y.l2, r.y.one_h);
    os << buf;
  }
}

std::vector<EigRow> eig_report(Domain domain, const std::vector<double> &betas, int levels, double sigma,
                               int max_power_iters, EigMethod method) {
  if (levels < 0 || levels > kMaxLevels)
    throw ConfigError("levels out of range");
  std::vector<EigRow> rows;
  for (double beta : betas) {
    ProblemParams params;
    params.beta = beta;
    params.sigma = sigma;
    auto stack = build_hierarchy(domain, levels, params);
    for (int k = 0; k <= levels; ++k) {
      EigRow r;
      r.beta = beta;
      r.k = k;
      r.h = stack->level(k).space->h();
      r.indicator = level_indicator(*stack, k);
      r.eig = method == EigMethod::power ? estimate_extreme_eigs(*stack, k, Variant::primal, max_power_iters)
                                         : lanczos_extreme_eigs(*stack, k, Variant::primal);
      r.scaled_max = r.eig.lambda_max / (r.indicator + 1.0);
      rows.push_back(r);
    }
  }
  return rows;
}

void write_eigs(std::ostream &os, const std::vector<EigRow> &rows) {
  os << "    beta   k          h   sqrt(b)/h^2   lam_min    lam_max   lam_max/(q+1)  conv\n";
  for (const auto &r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%8.1e %3d %10.3e %12.4e %10.4e %10.4e %14.4e  %s\n", r.beta, r.k, r.h,
                  r.indicator, r.eig.lambda_min, r.eig.lambda_max, r.scaled_max, r.eig.converged ? "yes" : "no");
    os << buf;
  }
}

} // namespace dgmg
