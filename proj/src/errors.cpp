#include "tdg/errors.hpp"

#include <sstream>

namespace tdg {

std::string describe_point(double t, const Vec& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(t=" << t << ", x=" << x << ')';
  return os.str();
}

EvaluationError::EvaluationError(const std::string& what, double t, Vec x)
    : NumericalError(what + " at " + describe_point(t, x)), t_(t), x_(std::move(x)) {}

NotPositiveDefinite::NotPositiveDefinite(double t, Vec x)
    : EvaluationError("not positive definite", t, std::move(x)) {}

NotAnImmersion::NotAnImmersion(double t, Vec x) : EvaluationError("not an immersion", t, std::move(x)) {}

}  // namespace tdg
