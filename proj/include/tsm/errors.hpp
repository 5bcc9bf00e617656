#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsm {

// Root of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- series-core -----------------------------------------------------------

class MismatchedBase : public Error {
 public:
  using Error::Error;
};

class ZeroLeadingCoefficient : public Error {
 public:
  using Error::Error;
};

class NegativeBaseFractionalPower : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class OrderUnderflow : public Error {
 public:
  using Error::Error;
};

// Raised when a coefficient overflows or becomes NaN. order() is the series
// order at which it was detected, or -1 when not known.
class NonFiniteCoefficient : public Error {
 public:
  explicit NonFiniteCoefficient(const std::string& what, int order = -1)
      : Error(what), order_(order) {}
  int order() const noexcept { return order_; }

 private:
  int order_;
};

// ---- problem front end -----------------------------------------------------

// Errors in the problem text or its structure. The CLI reports these as
// usage errors.
class ProblemError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public ProblemError {
 public:
  SyntaxError(int line, int column, const std::string& message)
      : ProblemError(std::to_string(line) + ":" + std::to_string(column) +
                     ": " + message),
        line_(line),
        column_(column),
        message_(message) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

class UndeclaredVariable : public ProblemError {
 public:
  using ProblemError::ProblemError;
};

class MissingInitialCondition : public ProblemError {
 public:
  using ProblemError::ProblemError;
};

class OverdeterminedSystem : public ProblemError {
 public:
  using ProblemError::ProblemError;
};

class ConditionCountMismatch : public ProblemError {
 public:
  using ProblemError::ProblemError;
};

class ImplicitEquation : public ProblemError {
 public:
  using ProblemError::ProblemError;
};

// ---- recurrence engine / transforms / continuation -------------------------

class UnsupportedNode : public Error {
 public:
  using Error::Error;
};

class KernelDomainError : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public Error {
 public:
  StepUnderflow(const std::string& what, double t, double h)
      : Error(what), t_(t), h_(h) {}
  double t() const noexcept { return t_; }
  double h() const noexcept { return h_; }

 private:
  double t_;
  double h_;
};

class DegeneratePade : public Error {
 public:
  using Error::Error;
};

class PoleAtEvaluationPoint : public Error {
 public:
  using Error::Error;
};

// ---- shooting --------------------------------------------------------------

class NoRootInBracket : public Error {
 public:
  using Error::Error;
};

class MaxIterationsExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace tsm
