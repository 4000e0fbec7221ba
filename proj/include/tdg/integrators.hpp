#pragma once

// Explicit Runge-Kutta integrators for y' = f(t, y).
//
// Fixed-step RK4 is used where the step structure must be a smooth function
// of the problem scale (the ε-probes); Dormand-Prince 4(5) with standard
// error control everywhere else. Both integrate forward or backward in t.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "tdg/linalg.hpp"

namespace tdg {

enum class Method { rk4_fixed, dopri45_adaptive };

const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct IntegratorConfig {
  Method method = Method::dopri45_adaptive;
  double step = 1e-2;  // rk4_fixed: largest step; dopri45: ignored
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_steps = 1000000;

  static IntegratorConfig rk4(double step, std::size_t max_steps = 1000000);
  static IntegratorConfig dopri(double abs_tol, double rel_tol, std::size_t max_steps = 1000000);

  // Throws ModelError on non-positive step, tolerances or budget.
  void validate() const;
  // Scale used by invariants phrased as "k × integrator tolerance".
  double tolerance() const;
};

using OdeRhs = std::function<Vec(double, const Vec&)>;

struct OdeSolution {
  std::vector<double> t;
  std::vector<Vec> y;
  std::vector<Vec> dy;  // f(t, y) at each sample, for Hermite interpolation
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

// Integrates from t0 to t1 (t1 < t0 allowed). An empty interval returns the
// single initial sample. Errors: IntegrationError("integration budget
// exhausted ...") and IntegrationError("blow-up at t=...").
OdeSolution integrate(const OdeRhs& f, double t0, const Vec& y0, double t1, const IntegratorConfig& cfg);

// Endpoint only; same semantics as integrate().
Vec integrate_endpoint(const OdeRhs& f, double t0, const Vec& y0, double t1, const IntegratorConfig& cfg);

}  // namespace tdg
