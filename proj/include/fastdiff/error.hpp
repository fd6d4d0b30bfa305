#pragma once

#include <stdexcept>
#include <string>

namespace fastdiff {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller misuse: unbound variables, signature mismatches, malformed input.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Division by zero, logarithm of a non-positive value, a pole, or any
/// non-finite intermediate. Carries the offending subexpression.
class SingularEvaluation : public Error {
 public:
  SingularEvaluation(const std::string& what, std::string subexpression)
      : Error(what + " in " + subexpression),
        subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

/// A user-supplied pair that fails the Cauchy-Riemann validation.
class RejectedPair : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Constant harmonic functions and other inputs that make a construction vacuous.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Every requested sample was skipped.
class EmptyReport : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace fastdiff
