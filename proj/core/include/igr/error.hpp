#pragma once

#include <stdexcept>
#include <string>

namespace igr {

/// Bad input: malformed files, inconsistent dimensions, violated preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown: singular systems, indefinite matrices, non-convergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A restricted second-moment matrix could not be inverted.
/// `environment` is the zero-based environment index, or -1 for the pooled matrix.
class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(int environment, const std::string& what)
      : NumericalError(what), environment_(environment) {}

  int environment() const noexcept { return environment_; }

 private:
  int environment_;
};

}  // namespace igr
