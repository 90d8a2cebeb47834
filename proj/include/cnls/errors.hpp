#pragma once

#include <stdexcept>
#include <string>

namespace cnls {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent sizes between a system, a mesh and a solution.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Newton iteration did not reach the residual tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// The (bordered) Jacobian is numerically singular.
class SingularJacobianError : public Error {
 public:
  using Error::Error;
};

/// Projection boundary conditions are undefined (spectral parameter on the
/// boundary of the essential spectrum).
class DegenerateProjectionError : public Error {
 public:
  using Error::Error;
};

/// Continuation step size fell below the configured minimum.
class StallError : public Error {
 public:
  StallError(const std::string& what, double last_value)
      : Error(what), last_value_(last_value) {}
  double last_value() const { return last_value_; }

 private:
  double last_value_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cnls
