#pragma once

#include <stdexcept>
#include <string>

namespace gfanm {

/// Base class of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes do not match, or a matrix that must be square/Hermitian is not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A state matrix has spectral radius >= 1.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be positive semidefinite has a clearly negative eigenvalue.
class NotPsdError : public Error {
 public:
  using Error::Error;
};

/// A factorization or fit is too ill-conditioned to be trusted.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// The input signal is too short for the requested transient truncation.
class InsufficientDataError : public Error {
 public:
  InsufficientDataError(const std::string& what, long required)
      : Error(what), required_length_(required) {}
  long required_length() const noexcept { return required_length_; }

 private:
  long required_length_;
};

/// The SDP iteration produced non-finite values.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration (unknown keys, violated model constraints).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Wraps a failure inside a multi-stage pipeline with the name of the stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(what.starts_with(stage + ":") ? what : stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace gfanm
