#pragma once

#include <stdexcept>
#include <string>

namespace bcert {

/// Malformed or inconsistent input: bad dimensions, unknown variables,
/// precondition violations. Maps to CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The request is well-formed but outside what this library supports
/// (unsupported moment degree, non-cancelling gain exponents, ...).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mode switch was requested while the dwell counter forbids it.
class DwellViolation : public InputError {
 public:
  using InputError::InputError;
};

/// The compositionality condition on the scaled gamma/lambda levels fails.
class CompositionInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid tool configuration (synthesis grids, option values).
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

/// Schema violation in a project file; carries a JSON-pointer location
/// and, for syntax errors, the line/column.
class SchemaError : public InputError {
 public:
  SchemaError(std::string location, const std::string& what)
      : InputError(location.empty() ? what : location + ": " + what), location_(std::move(location)) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

}  // namespace bcert
