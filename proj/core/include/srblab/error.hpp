#pragma once

#include <cstddef>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>

namespace srblab {

// Base class for every failure raised by the library. The CLI maps the
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point was handed to a map outside its declared domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed arguments: empty samples, mismatched grids, non-positive masses.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A point sits within the machine floor of the critical set, so log|det Df|
// is not representable. Carries the distance and, when raised while walking
// an orbit, the iterate index.
class NearCriticalError : public Error {
 public:
  explicit NearCriticalError(double distance,
                             std::optional<std::size_t> iterate = std::nullopt)
      : Error(describe(distance, iterate)), distance_(distance), iterate_(iterate) {}

  double distance() const noexcept { return distance_; }
  std::optional<std::size_t> iterate() const noexcept { return iterate_; }

  NearCriticalError at_iterate(std::size_t j) const { return NearCriticalError(distance_, j); }

 private:
  static std::string describe(double distance, std::optional<std::size_t> iterate) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", distance);
    std::string msg = std::string("point within the near-critical floor (dist = ") + buf + ")";
    if (iterate) msg += " at iterate " + std::to_string(*iterate);
    return msg;
  }

  double distance_;
  std::optional<std::size_t> iterate_;
};

// Induced-map construction could not resolve a branch or found a return that
// does not cover the inducing domain.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

class VerificationError : public Error {
 public:
  using Error::Error;
};

// Refusal to compute on an object whose preconditions were not established,
// e.g. an induced map that failed axiom verification.
class RefusalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, std::size_t iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// An induced orbit entered the uncovered (deficit) part of the inducing domain.
class CensoringError : public Error {
 public:
  CensoringError(const std::string& what, std::size_t step) : Error(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace srblab
