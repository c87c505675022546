#pragma once

#include <stdexcept>
#include <string>

namespace pseudopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violates an operation's precondition (bad order, empty grid, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to converge or to resolve the requested states.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A separation constant that must be real came out complex beyond tolerance,
/// or the Dirac reality condition lambda + M^2 > 0 failed.
class RealityViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed or schema-invalid run configuration. `line` is 1-based, 0 if unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace pseudopt
