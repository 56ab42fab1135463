#pragma once

#include <stdexcept>
#include <string>

namespace dgmg {

/// Bad user-supplied configuration (unknown domain, non-positive beta, ...).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an API precondition (mismatched spaces, wrong level).
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Numerical failure that indicates a bug, e.g. a singular coarse solve.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace dgmg
