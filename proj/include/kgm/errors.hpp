#pragma once

#include <stdexcept>
#include <string>

namespace kgm {

// Raised when an iterative solver hits its iteration cap before the
// requested tolerance. Carries the last residual so callers can report it.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, double residual, long iterations)
      : std::runtime_error(what), residual(residual), iterations(iterations) {}

  double residual;
  long iterations;
};

// Invalid run configuration (bad file, bad key, mode requirements violated).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kgm
