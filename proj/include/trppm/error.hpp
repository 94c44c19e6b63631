#pragma once

#include <stdexcept>
#include <string>

namespace trppm {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised by operations that only support part of the problem catalog.
class UnsupportedProblem : public Error {
 public:
  using Error::Error;
};

// No sample of a sampled region satisfied its membership test.
class InfeasibleRegion : public Error {
 public:
  using Error::Error;
};

// An inner solver (Newton, bisection, secular equation) failed to reach its
// residual target. Carries the last residual.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace trppm
