// Command-line driver: contraction tables, convergence study, eigenvalue
// report and the identity suite.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "dgmg/bench.hpp"
#include "dgmg/errors.hpp"

namespace {

struct Options {
  std::string domain = "unit_square";
  std::vector<double> betas;
  int levels = -1;
  int min_level = 1;
  std::vector<int> ms;
  std::string cycle = "W";
  double sigma = 6.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "table";
  std::string config;
  bool full = false;
  bool quiet = false;
  std::string method = "power";
};

struct Cli {
  CLI::App app{"DG multigrid for the optimal-control saddle system", "dgmg"};
  Options o;
  std::vector<CLI::App *> subs;

  Cli() {
    app.require_subcommand(1);
    app.set_version_flag("--version", dgmg::version_string());
    add("table", "measure W/V-cycle contraction numbers");
    add("converge", "manufactured-solution convergence study");
    add("eigs", "extreme eigenvalue report of the preconditioned normal operator");
    add("props", "run the identity/property suite");
  }

  void add(const std::string &name, const std::string &desc) {
    CLI::App *s = app.add_subcommand(name, desc);
    s->add_option("--domain", o.domain, "unit_square (square) or l_shaped");
    s->add_option("--beta", o.betas, "regularization parameter (repeatable)");
    s->add_option("--levels", o.levels, "finest level k")->check(CLI::Range(0, dgmg::kMaxLevels));
    s->add_option("--min-level", o.min_level, "coarsest reported level")->check(CLI::Range(1, dgmg::kMaxLevels));
    s->add_option("--m", o.ms, "smoothing steps m1 = m2 = m (repeatable)")->check(CLI::PositiveNumber);
    s->add_option("--cycle", o.cycle, "W or V")->transform(CLI::IsMember({"W", "V"}, CLI::ignore_case));
    s->add_option("--sigma", o.sigma, "interior penalty parameter")->check(CLI::PositiveNumber);
    s->add_option("--seed", o.seed, "random seed");
    s->add_option("--out", o.out, "output file (default stdout)");
    s->add_option("--format", o.format, "table or csv")->transform(CLI::IsMember({"table", "csv"}, CLI::ignore_case));
    s->add_option("--config", o.config, "key = value file; command-line flags take precedence");
    s->add_flag("--full", o.full, "allow levels above 5");
    s->add_flag("--quiet", o.quiet, "no progress on stderr");
    if (name == "eigs")
      s->add_option("--method", o.method, "power (the damping estimates) or lanczos (accurate extremes)")
          ->transform(CLI::IsMember({"power", "lanczos"}, CLI::ignore_case));
    subs.push_back(s);
  }

  CLI::App *active() const {
    for (auto *s : subs)
      if (s->parsed())
        return s;
    return nullptr;
  }
};

std::string trim(const std::string &s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos)
    return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Turns a key = value file into extra arguments for every key the command line left unset.
std::vector<std::string> config_arguments(const std::string &path, CLI::App &sub) {
  std::ifstream in(path);
  if (!in)
    throw dgmg::ConfigError("cannot open config file '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos)
      line.erase(h);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw dgmg::ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    for (auto &c : key)
      if (c == '_')
        c = '-';
    std::string value = trim(line.substr(eq + 1));
    if (key == "config")
      throw dgmg::ConfigError(path + ":" + std::to_string(lineno) + ": nested config files are not supported");
    CLI::Option *opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr)
      throw dgmg::ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (opt->count() > 0)
      continue;
    if (opt->get_type_size_max() == 0) {
      if (value == "true" || value == "1" || value == "yes")
        args.push_back("--" + key);
      continue;
    }
    for (auto &c : value)
      if (c == ',')
        c = ' ';
    std::istringstream ss(value);
    std::string tok;
    while (ss >> tok) {
      args.push_back("--" + key);
      args.push_back(tok);
    }
  }
  return args;
}

dgmg::ExperimentConfig experiment(const Options &o) {
  dgmg::ExperimentConfig cfg;
  cfg.domain = dgmg::parse_domain(o.domain);
  if (!o.betas.empty())
    cfg.betas = o.betas;
  if (o.levels >= 0)
    cfg.levels = o.levels;
  if (cfg.levels > 5 && !o.full)
    throw dgmg::ConfigError("levels above 5 are slow; pass --full to allow them");
  cfg.min_level = o.min_level;
  if (!o.ms.empty())
    cfg.m_values = o.ms;
  cfg.cycle = (o.cycle == "V" || o.cycle == "v") ? dgmg::CycleKind::V : dgmg::CycleKind::W;
  cfg.sigma = o.sigma;
  cfg.seed = o.seed;
  cfg.output = o.out;
  cfg.format = o.format == "csv" ? dgmg::OutputFormat::csv : dgmg::OutputFormat::table;
  return cfg;
}

int run(const std::string &cmd, const Options &o, std::ostream &os) {
  if (cmd == "table") {
    const dgmg::ExperimentConfig cfg = experiment(o);
    cfg.validate();
    auto progress = [&](const dgmg::TableCell &c) {
      if (!o.quiet)
        std::fprintf(stderr, "beta=%.1e k=%d m=%d contraction=%.3e cycles=%d %s\n", c.beta, c.k, c.m, c.contraction,
                     c.cycles_used, c.flag.c_str());
    };
    const auto table = dgmg::run_table(cfg, progress);
    if (cfg.format == dgmg::OutputFormat::csv)
      dgmg::write_csv(os, table);
    else
      dgmg::write_table_text(os, table);
    return 0;
  }
  if (cmd == "converge") {
    const auto domain = dgmg::parse_domain(o.domain);
    const std::vector<double> betas = o.betas.empty() ? std::vector<double>{1e-2} : o.betas;
    const int levels = o.levels >= 0 ? o.levels : 5;
    for (double beta : betas) {
      const auto rows = dgmg::convergence_study(domain, beta, levels, std::min(o.min_level, levels), o.sigma);
      if (o.format == "csv") {
        os << "domain,beta,k,h,l2_p,one_h_p,l2_y,one_h_y,l2_rate,one_h_rate\n";
        for (const auto &r : rows) {
          char buf[256];
          std::snprintf(buf, sizeof buf, "%s,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                        dgmg::to_string(domain).c_str(), beta, r.k, r.h, r.p.l2, r.p.one_h, r.y.l2, r.y.one_h,
                        r.l2_rate, r.one_h_rate);
          os << buf;
        }
      } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "beta = %.2e\n", beta);
        os << "# domain=" << dgmg::to_string(domain) << " sigma=" << o.sigma << "\n" << buf;
        dgmg::write_rates(os, rows);
      }
    }
    return 0;
  }
  if (cmd == "eigs") {
    const auto domain = dgmg::parse_domain(o.domain);
    const std::vector<double> betas = o.betas.empty() ? std::vector<double>{1e-2, 1e-4, 1e-6} : o.betas;
    const int levels = o.levels >= 0 ? o.levels : 4;
    if (levels > 5 && !o.full)
      throw dgmg::ConfigError("levels above 5 are slow; pass --full to allow them");
    const auto method = o.method == "lanczos" ? dgmg::EigMethod::lanczos : dgmg::EigMethod::power;
    dgmg::write_eigs(os, dgmg::eig_report(domain, betas, levels, o.sigma, 200, method));
    return 0;
  }
  // props
  dgmg::PropertySuiteOptions po;
  po.seed = o.seed;
  if (!o.betas.empty())
    po.betas = o.betas;
  if (o.levels >= 1)
    po.max_level = o.levels;
  bool ok = true;
  for (const auto &r : dgmg::run_property_suite(po)) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-4s %-32s max error %.3e (tolerance %.1e)\n", r.passed ? "PASS" : "FAIL",
                  r.name.c_str(), r.max_error, r.tolerance);
    os << buf;
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

} // namespace

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string cmd;
  Options opts;
  // The last parser that ran; its selected subcommand decides which help is shown.
  auto cli = std::make_unique<Cli>();
  try {
    {
      std::vector<std::string> rev(args.rbegin(), args.rend());
      cli->app.parse(rev);
    }
    CLI::App *sub = cli->active();
    cmd = sub->get_name();
    opts = cli->o;
    if (!opts.config.empty()) {
      std::vector<std::string> all = args;
      for (auto &a : config_arguments(opts.config, *sub))
        all.push_back(a);
      cli = std::make_unique<Cli>();
      std::vector<std::string> rev(all.rbegin(), all.rend());
      cli->app.parse(rev);
      opts = cli->o;
    }
  } catch (const CLI::CallForHelp &e) {
    return cli->app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return cli->app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return cli->app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n\n" << cli->app.help();
    return 2;
  } catch (const dgmg::ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n\n" << cli->app.help();
    return 2;
  }

  try {
    if (opts.out.empty())
      return run(cmd, opts, std::cout);
    std::ofstream file(opts.out);
    if (!file)
      throw std::runtime_error("cannot open output file '" + opts.out + "'");
    const int rc = run(cmd, opts, file);
    file.close();
    if (!file)
      throw std::runtime_error("error writing output file '" + opts.out + "'");
    return rc;
  } catch (const dgmg::ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n\n" << cli->app.help();
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
