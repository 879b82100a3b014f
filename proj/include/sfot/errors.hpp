// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#pragma once

#include <stdexcept>
#include <string>

namespace sfot {

struct SolverDiagnostics {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double runtime_sec = 0.0;
  bool converged = false;
};

/// Iteration limit reached before the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, SolverDiagnostics diag)
      : std::runtime_error(what), diagnostics(diag) {}

  SolverDiagnostics diagnostics;
};

/// Malformed configuration or schema violation in an input file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem-level failure (missing file, unwritable output).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sfot
