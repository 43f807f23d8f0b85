#pragma once

#include <stdexcept>
#include <string>

namespace ouhyper {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: unknown names, parameters outside a family's domain,
/// malformed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A check was requested on inputs outside the scope of the inequality
/// (e.g. a generator failing its structural condition, f not bounded away
/// from zero).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A function produced a non-finite value where a finite one was needed.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Value outside the numerically representable range (overflow, inverse
/// requested beyond the range of u, ...).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure stopped before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best, double estimate)
      : Error(what), best_(best), estimate_(estimate) {}

  double best() const noexcept { return best_; }
  double estimate() const noexcept { return estimate_; }

 private:
  double best_;
  double estimate_;
};

}  // namespace ouhyper
