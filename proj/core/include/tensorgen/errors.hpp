#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tensorgen {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument value is out of range or inconsistent with other arguments.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Container structure is inconsistent (factor/core/shape mismatch).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// The model cannot support the requested operation (e.g. zero factor column).
class DegenerateModelError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during generation (non-finite values, zero-norm SNR
/// calibration, invalid Poisson rates).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File read/write failure or malformed on-disk data.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Config parse or validation failure; carries the offending field path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace tensorgen
