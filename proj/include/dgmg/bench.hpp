#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dgmg/saddle_mg.hpp"

namespace dgmg {

std::string version_string();

/// Power-style contraction measurement on the homogeneous problem (b = 0, so the
/// iterate is the error). The iterate is renormalized every cycle.
struct ContractionProtocol {
  int starts = 3;
  int max_cycles = 60;
  double stable_rel_change = 1e-3;
  int stable_window = 3;
  double underflow = 1e-14; // per-cycle ratio treated as numerically zero
};

struct ContractionResult {
  double contraction = 0.0;
  int cycles_used = 0;
  std::string flag; // "", "underflow" or "unstable" (cycle cap reached)
};

ContractionResult measure_contraction(const SaddleMultigrid &mg, int k, std::uint64_t seed,
                                      const ContractionProtocol &protocol = {});

enum class OutputFormat { table, csv };

struct ExperimentConfig {
  Domain domain = Domain::unit_square;
  std::vector<double> betas{1e-2};
  int levels = 5;
  int min_level = 1;
  std::vector<int> m_values{1, 2, 4, 8, 16, 32, 64};
  CycleKind cycle = CycleKind::W;
  double sigma = 6.0;
  std::uint64_t seed = 1;
  std::string output; // empty: stdout
  OutputFormat format = OutputFormat::table;
  PrecondOptions precond;
  ContractionProtocol protocol;

  void validate() const;
};

struct TableCell {
  double beta = 0.0;
  int k = 0;
  int m = 0;
  double contraction = 0.0;
  int cycles_used = 0;
  std::string flag;

  bool operator==(const TableCell &) const = default;
};

struct ContractionTable {
  std::string domain;
  double sigma = 6.0;
  std::string cycle;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<TableCell> cells;

  std::optional<double> value(double beta, int k, int m) const;
  bool operator==(const ContractionTable &) const = default;
};

using ProgressFn = std::function<void(const TableCell &)>;

/// Measures every (beta, k, m) cell; one hierarchy per beta, one eigenvalue setup per beta.
ContractionTable run_table(const ExperimentConfig &cfg, const ProgressFn &progress = {});

/// Aligned text, one block per beta with rows k and columns m, 3 significant digits.
void write_table_text(std::ostream &os, const ContractionTable &table);
/// "# key=value" metadata lines, then domain,beta,sigma,cycle,k,m,contraction,cycles_used,flag.
void write_csv(std::ostream &os, const ContractionTable &table);
ContractionTable parse_csv(std::istream &is);

struct RateRow {
  int k = 0;
  double h = 0.0;
  ErrorNorms p, y;
  double l2_rate = 0.0;   // log2(e_{k-1}/e_k) for p; 0 on the first row
  double one_h_rate = 0.0;
};

/// Manufactured solution p = y = sin(w x) sin(w y) with w = pi on the square and
/// w = 2 pi on the L-shape (so it vanishes on the reentrant sides), zeta = (1, 0),
/// gamma = 0. Solves each level directly.
std::vector<RateRow> convergence_study(Domain domain, double beta, int max_level, int min_level = 1,
                                       double sigma = 6.0);
void write_rates(std::ostream &os, const std::vector<RateRow> &rows);

struct EigRow {
  double beta = 0.0;
  int k = 0;
  double h = 0.0;
  double indicator = 0.0; // beta^{1/2} h^{-2}
  EigEstimate eig;
  double scaled_max = 0.0; // lambda_max / (indicator + 1)
};

enum class EigMethod { power, lanczos };
/// power: the estimates the cycle uses for damping. lanczos: accurate extremes.
std::vector<EigRow> eig_report(Domain domain, const std::vector<double> &betas, int levels, double sigma = 6.0,
                               int max_power_iters = 200, EigMethod method = EigMethod::power);
void write_eigs(std::ostream &os, const std::vector<EigRow> &rows);

/// Identity/property checks run by the `props` subcommand and the acceptance suite.
struct PropertyResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct PropertySuiteOptions {
  std::vector<double> betas{1.0, 1e-4};
  int min_level = 1;
  int max_level = 3;
  int samples = 20;
  std::uint64_t seed = 7;
  double tolerance = 1e-11;
};

std::vector<PropertyResult> run_property_suite(const PropertySuiteOptions &options = {});

} // namespace dgmg
