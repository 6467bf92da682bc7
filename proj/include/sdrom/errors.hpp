#pragma once

#include <stdexcept>
#include <string>

namespace sdrom {

/// Invalid user configuration (grid extents, layouts, sizes, file contents).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-physical state encountered during flux or residual evaluation.
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nonlinear or linear solver breakdown / non-convergence.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Schwarz iteration failed to converge or a subdomain solve aborted.
class CouplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Snapshot ingestion / file format problems.
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Error metric preconditions violated (cadence or layout mismatch).
class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Layout bug: something that should be impossible by construction.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sdrom
