#pragma once

#include <stdexcept>
#include <string>

namespace rlab {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid inputs: malformed states, bad parameters, incompatible shapes.
/// The CLI maps these to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

/// State (or channel output) is not full rank / not positive definite.
struct RankError : ValidationError {
  using ValidationError::ValidationError;
};

struct DimensionError : ValidationError {
  using ValidationError::ValidationError;
};

/// Parameter outside the mathematical domain of an operation.
struct DomainError : ValidationError {
  using ValidationError::ValidationError;
};

/// Bad experiment / discretization configuration.
struct ConfigError : ValidationError {
  using ValidationError::ValidationError;
};

/// A lattice mode makes the requested quantity singular (e.g. massless zero mode).
struct SingularModeError : ValidationError {
  using ValidationError::ValidationError;
};

/// Failures arising during a computation. The CLI maps these to exit code 3.
struct NumericError : Error {
  using Error::Error;
};

/// Non-normalizable density: the integral diverges.
struct DivergenceError : NumericError {
  using NumericError::NumericError;
};

/// An iterative solve did not converge.
struct NoSolutionError : NumericError {
  using NumericError::NumericError;
};

/// A fit window lies outside the asymptotic regime it assumes.
struct WindowError : NumericError {
  using NumericError::NumericError;
};

}  // namespace rlab
