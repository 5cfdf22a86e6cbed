#pragma once

#include <stdexcept>
#include <string>

namespace soliton {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Caller violated an operation's precondition (existence window, sizes, ...).
struct PreconditionError : Error {
  using Error::Error;
};

/// The model cannot provide a requested quantity.
struct ModelError : Error {
  using Error::Error;
};

/// Iterative solver failed; carries the last residual it reached.
struct SolverError : Error {
  SolverError(const std::string& what, double last_residual)
      : Error(what + " (last residual " + std::to_string(last_residual) + ")"),
        residual(last_residual) {}
  double residual;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace soliton
