#pragma once

#include <stdexcept>
#include <string>

namespace chemotax {

/// Base of all errors raised by the library. The CLI maps subclasses onto
/// its exit-status contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition (bad grid, p < 1, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Configuration file problems; `path()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& what)
      : Error(key_path.empty() ? what : key_path + ": " + what), path_(std::move(key_path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Domain geometry does not satisfy the blow-up bound hypotheses.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// File-system failures while writing outputs.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Linear or nonlinear solver did not converge.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace chemotax
