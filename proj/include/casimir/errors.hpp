#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

// Input/configuration problems: bad files, malformed CSV, invalid parameters
// supplied from outside the library.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A series or approximation was evaluated outside its validity range.
class ValidityError : public std::domain_error {
 public:
  explicit ValidityError(const std::string& what) : std::domain_error(what) {}
};

// An iterative numerical procedure failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Fit-specific non-convergence (separate so the CLI can map it to its own
// exit code).
class FitConvergenceError : public ConvergenceError {
 public:
  explicit FitConvergenceError(const std::string& what) : ConvergenceError(what) {}
};

// Optical table lacks resolution around the integrand peak of the
// Kramers-Kronig transform.
class TableTooSparseError : public std::runtime_error {
 public:
  explicit TableTooSparseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace casimir
