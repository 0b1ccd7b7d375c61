#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace growthdyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite time or an argument outside the mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters: certificate constants, window schedules, grids.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Floating-point overflow in matrix (non log-space) evaluation.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// The requested computation is outside what the library implements.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Malformed external input: CSV tables, coefficient evaluation failures.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Configuration that does not match the schema; carries the offending field.
class UsageError : public Error {
 public:
  UsageError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace growthdyn
