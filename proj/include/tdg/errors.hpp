#pragma once

#include <stdexcept>
#include <string>

#include "tdg/linalg.hpp"

namespace tdg {

// Base for everything numerical that can go wrong at a specific point.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A field evaluator failed (non-finite result, wrong shape) at (t, x).
class EvaluationError : public NumericalError {
 public:
  EvaluationError(const std::string& what, double t, Vec x);
  double t() const { return t_; }
  const Vec& x() const { return x_; }

 private:
  double t_;
  Vec x_;
};

class NotPositiveDefinite : public EvaluationError {
 public:
  NotPositiveDefinite(double t, Vec x);
};

class NotAnImmersion : public EvaluationError {
 public:
  NotAnImmersion(double t, Vec x);
};

// ODE integration failures: budget exhausted or blow-up.
class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Bad inputs to a constructor or operation (dimension mismatch, invalid
// parameters). Distinct from numerical failure so the CLI can map it to an
// input error.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string describe_point(double t, const Vec& x);

}  // namespace tdg
