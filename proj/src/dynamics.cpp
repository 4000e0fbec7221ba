#include "tdg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tdg/quadrature.hpp"

namespace tdg {

namespace {

constexpr double kQuadTol = 1e-9;

Vec concat(const Vec& a, const Vec& b) {
  Vec r(a.size() + b.size());
  std::copy(a.begin(), a.end(), r.begin());
  std::copy(b.begin(), b.end(), r.begin() + static_cast<std::ptrdiff_t>(a.size()));
  return r;
}

Vec slice(const Vec& y, std::size_t from, std::size_t count) {
  Vec r(count);
  for (std::size_t i = 0; i < count; ++i) r[i] = y[from + i];
  return r;
}

void require(std::size_t n, const Vec& v, const char* what) {
  if (v.size() != n)
    throw ModelError(std::string(what) + " has dimension " + std::to_string(v.size()) + ", expected " +
                     std::to_string(n));
}

// Second-order system x'' = acc(t, x, x') as a first-order one on (x, v).
Trajectory second_order(const std::function<Vec(double, const Vec&, const Vec&)>& acc, double t0, const Vec& x0,
                        const Vec& v0, double t1, const IntegratorConfig& cfg) {
  const std::size_t n = x0.size();
  const OdeRhs rhs = [&acc, n](double t, const Vec& y) {
    const Vec x = slice(y, 0, n), v = slice(y, n, n);
    return concat(v, acc(t, x, v));
  };
  const OdeSolution sol = integrate(rhs, t0, concat(x0, v0), t1, cfg);
  std::vector<Vec> xs, vs, as;
  xs.reserve(sol.t.size());
  vs.reserve(sol.t.size());
  as.reserve(sol.t.size());
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    xs.push_back(slice(sol.y[i], 0, n));
    vs.push_back(slice(sol.y[i], n, n));
    as.push_back(slice(sol.dy[i], n, n));
  }
  return Trajectory(sol.t, std::move(xs), std::move(vs), std::move(as));
}

double norm_g(const Mat& g, const Vec& v) { return std::sqrt(std::max(0.0, bilinear(g, v, v))); }

}  // namespace

Trajectory flow(const TimeDepVectorField& X, double t0, const Vec& p, double t1, const IntegratorConfig& cfg) {
  require(X.dim(), p, "flow start point");
  const OdeRhs rhs = [&X](double t, const Vec& x) { return X(t, x); };
  const OdeSolution sol = integrate(rhs, t0, p, t1, cfg);
  std::vector<Vec> as;
  as.reserve(sol.t.size());
  for (std::size_t i = 0; i < sol.t.size(); ++i)
    as.push_back(X.dt(sol.t[i], sol.y[i]) + X.jac_x(sol.t[i], sol.y[i]) * sol.dy[i]);
  return Trajectory(sol.t, sol.y, sol.dy, std::move(as));
}

Vec flow_tangent(const TimeDepVectorField& X, double t0, const Vec& p, double t1, const Vec& w0,
                 const IntegratorConfig& cfg) {
  const std::size_t n = X.dim();
  require(n, p, "flow start point");
  require(n, w0, "tangent vector");
  const OdeRhs rhs = [&X, n](double t, const Vec& y) {
    const Vec x = slice(y, 0, n), w = slice(y, n, n);
    return concat(X(t, x), X.jac_x(t, x) * w);
  };
  return slice(integrate_endpoint(rhs, t0, concat(p, w0), t1, cfg), n, n);
}

Vec geodesic_metric_accel(const MetricField& m, double t, const Vec& x, const Vec& v) {
  const MetricJet jet = m.jet(t, x);
  const Mat ginv = inverse_spd(jet.g, t, x);
  const Tensor gamma = levi_civita_at(jet, t, x);
  return -1.0 * gamma.contract(v, v) - ginv * (jet.dg_dt * v);
}

Trajectory geodesic_metric(const MetricField& m, double t0, const Vec& x0, const Vec& v0, double t1,
                           const IntegratorConfig& cfg) {
  require(m.dim(), x0, "initial point");
  require(m.dim(), v0, "initial velocity");
  return second_order([&m](double t, const Vec& x, const Vec& v) { return geodesic_metric_accel(m, t, x, v); }, t0,
                      x0, v0, t1, cfg);
}

Vec geodesic_dotnabla_accel(const DotNabla& dn, double t, const Vec& x, const Vec& v) {
  return -1.0 * dn.gamma(t, x).contract(v, v) - dn.C(t, x) - (dn.A(t, x) + dn.B(t, x)) * v;
}

Trajectory geodesic_dotnabla(const DotNabla& dn, double t0, const Vec& x0, const Vec& v0, double t1,
                             const IntegratorConfig& cfg) {
  require(dn.dim(), x0, "initial point");
  require(dn.dim(), v0, "initial velocity");
  return second_order([&dn](double t, const Vec& x, const Vec& v) { return geodesic_dotnabla_accel(dn, t, x, v); },
                      t0, x0, v0, t1, cfg);
}

Trajectory geodesic_extended(const ExtendedConnection& ec, double s0, const Vec& y0, const Vec& u0, double s1,
                             const IntegratorConfig& cfg) {
  const std::size_t n = ec.dim();
  require(n + 1, y0, "initial point on R x M");
  require(n + 1, u0, "initial velocity on R x M");
  const auto acc = [&ec, n](double, const Vec& y, const Vec& u) {
    const Tensor h = ec.christoffel_hat(y[0], slice(y, 1, n));
    return -1.0 * h.contract(u, u);
  };
  return second_order(acc, s0, y0, u0, s1, cfg);
}

Trajectory geodesic_suspension(const MetricField& m, double t0, const Vec& x0, const Vec& v0, double s1,
                               const IntegratorConfig& cfg, double time_rate) {
  require(m.dim(), x0, "initial point");
  require(m.dim(), v0, "initial velocity");
  const ExtendedConnection ec = suspension_connection(m);
  return geodesic_extended(ec, t0, concat(Vec{t0}, x0), concat(Vec{time_rate}, v0), s1, cfg);
}

Vec forced_accel(const MetricField& m, const ScalarField& V, double t, const Vec& x, const Vec& v,
                 ForceConvention conv) {
  const Vec force = metric_inverse(m, Event{t, x}) * V.grad_x(t, x);
  const double sign = conv == ForceConvention::lagrangian ? -1.0 : 1.0;
  return geodesic_metric_accel(m, t, x, v) + sign * force;
}

Trajectory forced_geodesic(const MetricField& m, const ScalarField& V, double t0, const Vec& x0, const Vec& v0,
                           double t1, const IntegratorConfig& cfg, ForceConvention conv) {
  require(m.dim(), x0, "initial point");
  require(m.dim(), v0, "initial velocity");
  if (V.dim() != m.dim()) throw ModelError("potential dimension does not match the metric");
  return second_order([&](double t, const Vec& x, const Vec& v) { return forced_accel(m, V, t, x, v, conv); }, t0,
                      x0, v0, t1, cfg);
}

SampledVector parallel_transport(const DotNabla& dn, const std::function<Vec(double)>& gamma,
                                 const std::function<Vec(double)>& gamma_dot, double t0, double t1, const Vec& w0,
                                 const IntegratorConfig& cfg) {
  require(dn.dim(), w0, "transported vector");
  const OdeRhs rhs = [&](double t, const Vec& w) {
    const Vec x = gamma(t), v = gamma_dot(t);
    return -1.0 * dn.gamma(t, x).contract(v, w) - dn.C(t, x) - dn.A(t, x) * v - dn.B(t, x) * w;
  };
  const OdeSolution sol = integrate(rhs, t0, w0, t1, cfg);
  return SampledVector(sol.t, sol.y, sol.dy);
}

SampledVector parallel_transport(const DotNabla& dn, const Trajectory& base, const Vec& w0,
                                 const IntegratorConfig& cfg) {
  if (base.dim() != dn.dim()) throw ModelError("base path dimension does not match the connection");
  return parallel_transport(
      dn, [&base](double t) { return base.position(t); }, [&base](double t) { return base.velocity(t); },
      base.t_front(), base.t_back(), w0, cfg);
}

GeodesicTransport geodesic_with_transport(const DotNabla& dn, double t0, const Vec& x0, const Vec& v0, double t1,
                                          const std::vector<Vec>& w0, const IntegratorConfig& cfg) {
  const std::size_t n = dn.dim();
  require(n, x0, "initial point");
  require(n, v0, "initial velocity");
  Vec y0 = concat(x0, v0);
  for (const Vec& w : w0) {
    require(n, w, "transported vector");
    y0 = concat(y0, w);
  }
  const std::size_t k = w0.size();
  const OdeRhs rhs = [&dn, n, k](double t, const Vec& y) {
    const Vec x = slice(y, 0, n), v = slice(y, n, n);
    const Tensor g = dn.gamma(t, x);
    const Vec c = dn.C(t, x);
    const Mat a = dn.A(t, x), b = dn.B(t, x);
    Vec out = concat(v, -1.0 * g.contract(v, v) - c - (a + b) * v);
    for (std::size_t j = 0; j < k; ++j) {
      const Vec w = slice(y, (2 + j) * n, n);
      out = concat(out, -1.0 * g.contract(v, w) - c - a * v - b * w);
    }
    return out;
  };
  const Vec y1 = integrate_endpoint(rhs, t0, y0, t1, cfg);
  GeodesicTransport r{slice(y1, 0, n), slice(y1, n, n), {}};
  for (std::size_t j = 0; j < k; ++j) r.w.push_back(slice(y1, (2 + j) * n, n));
  return r;
}

Vec covariant_acceleration(const MetricField& m, double t, const Vec& x, const Vec& v, const Vec& a) {
  return a + levi_civita_at(m.jet(t, x), t, x).contract(v, v);
}

double kinetic_rate(const MetricField& m, double t, const Vec& x, const Vec& v, const Vec& a) {
  const MetricJet jet = m.jet(t, x);
  const Vec nabla = a + levi_civita_at(jet, t, x).contract(v, v);
  return 0.5 * bilinear(jet.dg_dt, v, v) + bilinear(jet.g, nabla, v);
}

FunctionalReport functionals(const MetricField& m, const Trajectory& base) {
  if (base.dim() != m.dim()) throw ModelError("path dimension does not match the metric");
  FunctionalReport r;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double t = base.t(i);
    const Vec& x = base.x(i);
    const Vec& v = base.v(i);
    const MetricJet jet = m.jet(t, x);
    r.kinetic_series.emplace_back(t, 0.5 * bilinear(jet.g, v, v));
    const auto l = cholesky(jet.g);
    if (!l) {
      ++r.el_skipped;
      continue;
    }
    const Mat ginv = cholesky_inverse(*l);
    const Vec res = base.a(i) + levi_civita_at(jet, t, x).contract(v, v) + ginv * (jet.dg_dt * v);
    r.el_residual_max = std::max(r.el_residual_max, norm_g(jet.g, res));
  }
  if (base.size() < 2) return r;
  const double width = std::abs(base.t_back() - base.t_front());
  for (std::size_t i = 0; i + 1 < base.size(); ++i) {
    const double a = std::min(base.t(i), base.t(i + 1));
    const double b = std::max(base.t(i), base.t(i + 1));
    const double tol = kQuadTol * (b - a) / width;
    r.energy += adaptive_simpson(
        [&](double t) {
          const Vec v = base.velocity(t);
          return 0.5 * bilinear(m.g(t, base.position(t)), v, v);
        },
        a, b, tol);
    r.length += adaptive_simpson([&](double t) { return norm_g(m.g(t, base.position(t)), base.velocity(t)); }, a,
                                 b, tol);
  }
  return r;
}

double embedded_length(const EmbeddingFamily& fam, const Trajectory& base) {
  if (base.dim() != fam.dim()) throw ModelError("path dimension does not match the embedding");
  if (base.size() < 2) return 0.0;
  const double width = std::abs(base.t_back() - base.t_front());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < base.size(); ++i) {
    const double a = std::min(base.t(i), base.t(i + 1));
    const double b = std::max(base.t(i), base.t(i + 1));
    total += adaptive_simpson(
        [&](double t) {
          const Vec p = base.position(t);
          return norm2(fam.dj_dt(t, p) + fam.dj_dp(t, p) * base.velocity(t));
        },
        a, b, kQuadTol * (b - a) / width);
  }
  return total;
}

double length_critical_residual(const MetricField& m, const Trajectory& base) {
  if (base.dim() != m.dim()) throw ModelError("path dimension does not match the metric");
  double worst = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double t = base.t(i);
    const Vec& x = base.x(i);
    const Vec& v = base.v(i);
    const MetricJet jet = m.jet(t, x);
    const double T = 0.5 * bilinear(jet.g, v, v);
    if (T < 1e-14) {
      std::ostringstream os;
      os << "stationary point on path at t=" << t;
      throw NumericalError(os.str());
    }
    const Mat ginv = inverse_spd(jet.g, t, x);
    const Vec nabla = base.a(i) + levi_civita_at(jet, t, x).contract(v, v);
    const double dT = 0.5 * bilinear(jet.dg_dt, v, v) + bilinear(jet.g, nabla, v);
    const Vec res = nabla + ginv * (jet.dg_dt * v) - (dT / (2.0 * T)) * v;
    worst = std::max(worst, norm_g(jet.g, res));
  }
  return worst;
}

}  // namespace tdg
