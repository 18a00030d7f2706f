#pragma once

#include <stdexcept>
#include <string>

namespace tfm {

class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class OutOfDomain : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SingularSystem : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Iterative method hit its iteration limit. `residual` is the last relative
/// residual (linear solvers) or worst complementarity violation (VI solver).
class NonConvergence : public std::runtime_error {
public:
  NonConvergence(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

private:
  double residual_;
  int iterations_;
};

class BracketError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class StagnationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A sub-solver inside a time step failed. `substep` names which one.
class StepFailure : public std::runtime_error {
public:
  StepFailure(std::string substep, const std::string& detail)
      : std::runtime_error(substep + ": " + detail), substep_(std::move(substep)) {}
  const std::string& substep() const noexcept { return substep_; }

private:
  std::string substep_;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace tfm
