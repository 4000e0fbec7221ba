#pragma once

// Flows, geodesics, transport and path functionals.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "tdg/connection.hpp"
#include "tdg/embedding.hpp"
#include "tdg/integrators.hpp"
#include "tdg/metric.hpp"
#include "tdg/trajectory.hpp"

namespace tdg {

// Φ_X(t1, t0, p). Samples store v = X(t, x) and a = Ẋ + (∂X/∂x)X.
Trajectory flow(const TimeDepVectorField& X, double t0, const Vec& p, double t1, const IntegratorConfig& cfg);

// TΦ_X(t1, t0, p)·w0 through the variational equation ẇ = (∂X/∂x) w.
Vec flow_tangent(const TimeDepVectorField& X, double t0, const Vec& p, double t1, const Vec& w0,
                 const IntegratorConfig& cfg);

// ẍ = −Γ(ẋ, ẋ) − G⁻¹Ġ ẋ
Vec geodesic_metric_accel(const MetricField& m, double t, const Vec& x, const Vec& v);
Trajectory geodesic_metric(const MetricField& m, double t0, const Vec& x0, const Vec& v0, double t1,
                           const IntegratorConfig& cfg);

// ẍ = −Γ(ẋ, ẋ) − C − (A + B) ẋ
Vec geodesic_dotnabla_accel(const DotNabla& dn, double t, const Vec& x, const Vec& v);
Trajectory geodesic_dotnabla(const DotNabla& dn, double t0, const Vec& x0, const Vec& v0, double t1,
                             const IntegratorConfig& cfg);

// Geodesic of Γ̂ on ℝ×M in an affine parameter s. The state has n+1
// components, component 0 being the time coordinate γ⁰.
Trajectory geodesic_extended(const ExtendedConnection& ec, double s0, const Vec& y0, const Vec& u0, double s1,
                             const IntegratorConfig& cfg);

// Suspension-metric geodesic starting at (t0, x0) with velocity
// (time_rate, v0), parameter s running from t0 to s1.
Trajectory geodesic_suspension(const MetricField& m, double t0, const Vec& x0, const Vec& v0, double s1,
                               const IntegratorConfig& cfg, double time_rate = 1.0);

// Which way the potential pushes. `lagrangian` is L = T − V, i.e.
// ẍ = (geodesic terms) − G⁻¹∇V. `as_printed` is the opposite sign.
enum class ForceConvention { lagrangian, as_printed };

Vec forced_accel(const MetricField& m, const ScalarField& V, double t, const Vec& x, const Vec& v,
                 ForceConvention conv = ForceConvention::lagrangian);
Trajectory forced_geodesic(const MetricField& m, const ScalarField& V, double t0, const Vec& x0, const Vec& v0,
                           double t1, const IntegratorConfig& cfg,
                           ForceConvention conv = ForceConvention::lagrangian);

// ẇ = −Γ(γ', w) − C − A(γ') − B(w) along a given path.
SampledVector parallel_transport(const DotNabla& dn, const Trajectory& base, const Vec& w0,
                                 const IntegratorConfig& cfg);
SampledVector parallel_transport(const DotNabla& dn, const std::function<Vec(double)>& gamma,
                                 const std::function<Vec(double)>& gamma_dot, double t0, double t1, const Vec& w0,
                                 const IntegratorConfig& cfg);

// Geodesic of ∇̇ integrated jointly with the transport of extra vectors, so
// both see the same step structure.
struct GeodesicTransport {
  Vec x;
  Vec v;
  std::vector<Vec> w;
};
GeodesicTransport geodesic_with_transport(const DotNabla& dn, double t0, const Vec& x0, const Vec& v0, double t1,
                                          const std::vector<Vec>& w0, const IntegratorConfig& cfg);

// ∇_t γ' = γ'' + Γ(γ', γ') at frozen t.
Vec covariant_acceleration(const MetricField& m, double t, const Vec& x, const Vec& v, const Vec& a);

// dT/dt = ½ ġ(γ', γ') + g(∇_t γ', γ').
double kinetic_rate(const MetricField& m, double t, const Vec& x, const Vec& v, const Vec& a);

struct FunctionalReport {
  double energy = 0.0;
  double length = 0.0;
  std::vector<std::pair<double, double>> kinetic_series;  // (t, ½ g_t(γ', γ'))
  double el_residual_max = 0.0;
  // Samples where g is not positive definite (e.g. t = 0 for g = t² dθ²)
  // are left out of the residual and counted here.
  std::size_t el_skipped = 0;
};

FunctionalReport functionals(const MetricField& m, const Trajectory& base);

double embedded_length(const EmbeddingFamily& fam, const Trajectory& base);

// max over samples of |∇_tγ' + G⁻¹Ġγ' − (dT/dt)/(2T) γ'|_g. Throws
// NumericalError("stationary point on path ...") when T < 1e-14.
double length_critical_residual(const MetricField& m, const Trajectory& base);

}  // namespace tdg
