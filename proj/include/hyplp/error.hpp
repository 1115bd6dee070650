#pragma once

#include <stdexcept>
#include <string>

namespace hyplp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Elements of two different groups were combined.
class SpecMismatch : public Error {
 public:
  using Error::Error;
};

/// A product or lookup left the materialized window of an explicit ball.
class OutOfWindow : public Error {
 public:
  using Error::Error;
};

/// A set that must be computed exactly was truncated by the window.
class ExactnessError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// Memory budget exceeded while materializing a ball.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A construction invariant failed; `witness` carries a serialized witness.
class InvariantViolation : public Error {
 public:
  InvariantViolation(const std::string& what, std::string witness = {})
      : Error(what), witness_(std::move(witness)) {}
  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string witness_;
};

/// Failure modes of Cayley-ball file ingestion.
enum class LoadErrorKind { malformed, non_symmetric, missing_basepoint, radius_mismatch };

class LoadError : public Error {
 public:
  LoadError(LoadErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  LoadErrorKind kind() const noexcept { return kind_; }

 private:
  LoadErrorKind kind_;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class SelectionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hyplp
