#pragma once

#include <stdexcept>
#include <string>

namespace cpair {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Contract violations on inputs. The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Failures of a numerical procedure on valid input. CLI exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidMatrix : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidParameter : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidFilter : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidSupport : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ModeMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IntervalTooSmall : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UseMonteCarlo : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class FunctionDomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AssemblyRankError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DenominatorNonpositive : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace cpair
