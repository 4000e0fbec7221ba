#pragma once

// Built-in models: Euclidean space, the conformal plane e^{2t}Id, the two
// circle embedding families and the double pendulum with variable masses.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdg/embedding.hpp"
#include "tdg/fields.hpp"
#include "tdg/metric.hpp"

namespace tdg {

using ModelParams = std::map<std::string, double>;

struct ModelBundle {
  std::string name;
  std::string description;
  ModelParams params;  // effective parameters, defaults filled in
  MetricField metric;  // autodiff-backed
  std::optional<MetricField> closed_form;
  std::optional<EmbeddingFamily> embedding;
  std::optional<ScalarField> potential;

  std::size_t dim() const { return metric.dim(); }
};

const std::vector<std::string>& builtin_names();

// Throws ModelError listing the available names when `name` is unknown, or
// naming the offending key when a parameter is not recognised.
ModelBundle builtin(const std::string& name, const ModelParams& params = {});

MetricField euclidean_metric(std::size_t n);
MetricField conformal_plane_metric();

// θ ↦ (t cos θ, t sin θ)
EmbeddingFamily circle_scaling_family();
// Clockwise rotation by ωt: θ ↦ (cos(θ − ωt), sin(θ − ωt)).
EmbeddingFamily circle_rotation_family(double omega);

// Angles φ₁, φ₂ are measured from the upward vertical.
struct PendulumParams {
  double l1 = 1.0;
  double l2 = 1.0;
  TimeFunction m1;
  TimeFunction m2;
  double g0 = 9.81;

  // l = (1, 1), m₁(t) = 2 + sin t, m₂(t) = 1 + 0.5 cos t.
  static PendulumParams defaults();
  // m₁ = a₁ + b₁ sin(ω₁ t), m₂ = a₂ + b₂ cos(ω₂ t).
  static PendulumParams schedules(double l1, double l2, double a1, double b1, double w1, double a2, double b2,
                                  double w2, double g0);

  // Lengths positive, g0 ≥ 0 and both masses positive on a grid over [t0, t1].
  void validate(double t0 = 0.0, double t1 = 10.0) const;
};

MetricField pendulum_metric(const PendulumParams& p);           // closed form
MetricField pendulum_metric_autodiff(const PendulumParams& p);  // oracle twin

// V = g₀(ℓ₁(m₁ + m₂) cos φ₁ + ℓ₂ m₂ cos φ₂)
ScalarField pendulum_potential(const PendulumParams& p);

// The closed forms exactly as printed for the double pendulum, kept apart
// from the derived ones so that discrepancies can be reported.
namespace printed {

enum class Denominator { m1, m2 };
enum class WChoice {
  as_printed,               // m₁ṁ₂ − m₁ṁ₂ (identically zero)
  m1dot_m2_minus_m1_m2dot,  // ṁ₁m₂ − m₁ṁ₂
  m1_m2dot_minus_m1dot_m2,  // m₁ṁ₂ − ṁ₁m₂
};

const char* to_string(Denominator d);
const char* to_string(WChoice w);
double w_value(const PendulumParams& p, double t, WChoice w);

Mat inverse_metric(const PendulumParams& p, double t, const Vec& phi);
// Ġ = (ṁ₂/m₂) G + ℓ₁² (ṁ₁m₂ − m₁ṁ₂)/den · E₁₁
Mat metric_dot(const PendulumParams& p, double t, const Vec& phi, Denominator den);
// G⁻¹Ġ = (ṁ₂/m₂) Id + (ṁ₁m₂ − m₁ṁ₂)/(den·D) [[1, 0], [−(ℓ₁/ℓ₂) cos Δ, 0]]
Mat musical(const PendulumParams& p, double t, const Vec& phi, Denominator den);
// The four listed symbols, all others zero.
Tensor christoffel(const PendulumParams& p, double t, const Vec& phi);
Tensor christoffel_dot(const PendulumParams& p, double t, const Vec& phi, WChoice w);
// The two displayed φ̈ equations with V = 0.
Vec geodesic_accel(const PendulumParams& p, double t, const Vec& phi, const Vec& phidot);

}  // namespace printed

}  // namespace tdg
