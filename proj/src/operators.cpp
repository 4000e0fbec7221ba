#include "tdg/operators.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace tdg {

double lie_derivative_scalar(const TimeDepVectorField& X, const ScalarField& f, const Event& e) {
  check_event(e, X.dim());
  return f.dt(e.t, e.x) + dot(X(e.t, e.x), f.grad_x(e.t, e.x));
}

Vec lie_bracket(const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e) {
  check_event(e, X.dim());
  return Y.jac_x(e.t, e.x) * X(e.t, e.x) - X.jac_x(e.t, e.x) * Y(e.t, e.x);
}

Vec lie_derivative_vector(const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e) {
  return Y.dt(e.t, e.x) + lie_bracket(X, Y, e);
}

Vec td_bracket(const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e) {
  check_event(e, X.dim());
  // Grouped as (terms driven by Y) − (terms driven by X) so that swapping the
  // arguments negates the result bit for bit.
  const Vec xv = X(e.t, e.x), yv = Y(e.t, e.x);
  return (Y.jac_x(e.t, e.x) * xv + Y.dt(e.t, e.x)) - (X.jac_x(e.t, e.x) * yv + X.dt(e.t, e.x));
}

SplitVector extended_bracket(const ExtendedField& Xhat, const ExtendedField& Yhat, const Event& e) {
  check_event(e, Xhat.dim());
  const double t = e.t;
  const Vec& x = e.x;
  const double f0 = Xhat.f0(t, x), g0 = Yhat.f0(t, x);
  const Vec X = Xhat.X(t, x), Y = Yhat.X(t, x);
  SplitVector r;
  r.horizontal = f0 * Yhat.f0.dt(t, x) + dot(X, Yhat.f0.grad_x(t, x)) - g0 * Xhat.f0.dt(t, x) -
                 dot(Y, Xhat.f0.grad_x(t, x));
  r.vertical = f0 * Yhat.X.dt(t, x) + Yhat.X.jac_x(t, x) * X - g0 * Xhat.X.dt(t, x) - Xhat.X.jac_x(t, x) * Y;
  return r;
}

TorsionEvaluation torsion_constructions(const DotNabla& dn, const TimeDepVectorField& X,
                                        const TimeDepVectorField& Y, const Event& e) {
  check_event(e, dn.dim());
  const Vec xv = X(e.t, e.x), yv = Y(e.t, e.x);
  const Tensor g = dn.gamma(e.t, e.x);
  TorsionEvaluation r;
  r.formula = g.contract(xv, yv) - g.contract(yv, xv) + (dn.A(e.t, e.x) - dn.B(e.t, e.x)) * (xv - yv);
  r.third_construction = dotnabla_apply(dn, X, Y, e) - dotnabla_apply(dn, Y, X, e) - td_bracket(X, Y, e);
  r.mismatch = norm_inf(r.formula - r.third_construction);
  return r;
}

Vec torsion_operator(const DotNabla& dn, const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e) {
  TorsionEvaluation r = torsion_constructions(dn, X, Y, e);
  const double scale = 1.0 + norm_inf(r.formula) + norm_inf(dotnabla_apply(dn, X, Y, e));
  if (r.mismatch > 1e-10 * scale) {
    std::ostringstream os;
    os << "torsion constructions disagree by " << r.mismatch;
    throw NumericalError(os.str());
  }
  return r.formula;
}

VerticalTorsion vertical_torsion_check(const ExtendedConnection& ec, const TimeDepVectorField& X,
                                       const TimeDepVectorField& Y, const Event& e) {
  const ExtendedField xs = suspension(X), ys = suspension(Y);
  const SplitVector xy = extended_cov_deriv(ec, xs, ys, e);
  const SplitVector yx = extended_cov_deriv(ec, ys, xs, e);
  const SplitVector br = extended_bracket(xs, ys, e);
  VerticalTorsion r;
  r.vertical = xy.vertical - yx.vertical - br.vertical;
  r.horizontal = xy.horizontal - yx.horizontal - br.horizontal;
  r.expected_vertical = torsion_operator(ec.core, X, Y, e);
  const Vec xv = X(e.t, e.x), yv = Y(e.t, e.x);
  const Mat eps = ec.eps(e.t, e.x);
  r.expected_horizontal = dot(ec.alpha(e.t, e.x) - ec.beta(e.t, e.x), xv - yv) + bilinear(eps, xv, yv) -
                          bilinear(eps, yv, xv);
  return r;
}

Vec richardson(const std::vector<double>& eps, const std::vector<Vec>& values, std::vector<std::vector<Vec>>* table) {
  const std::size_t m = eps.size();
  if (m == 0 || values.size() != m) throw ModelError("richardson: need matching, non-empty samples");
  // Neville's scheme evaluated at ε = 0.
  std::vector<std::vector<Vec>> p(m);
  p[0] = values;
  for (std::size_t j = 1; j < m; ++j) {
    for (std::size_t i = 0; i + j < m; ++i) {
      const double ei = eps[i], ej = eps[i + j];
      p[j].push_back((ei * p[j - 1][i + 1] - ej * p[j - 1][i]) / (ei - ej));
    }
  }
  Vec best = p[m - 1][0];
  if (table) *table = std::move(p);
  return best;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  const std::size_t n = lx.size();
  if (n < 2) return std::nan("");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : std::nan("");
}

namespace {

void validate(const ProbeOptions& opts) {
  if (opts.epsilons.empty()) throw ModelError("probe needs at least one epsilon");
  for (std::size_t i = 0; i < opts.epsilons.size(); ++i) {
    if (!(opts.epsilons[i] > 0.0)) throw ModelError("probe epsilons must be > 0");
    if (i > 0 && !(opts.epsilons[i] < opts.epsilons[i - 1]))
      throw ModelError("probe epsilons must be strictly decreasing");
  }
  if (opts.substeps < 1) throw ModelError("probe substeps must be >= 1");
  if (!(opts.tolerance > 0.0)) throw ModelError("probe tolerance must be > 0");
}

Vec flow_endpoint(const TimeDepVectorField& X, double t0, const Vec& p, double t1, const IntegratorConfig& cfg) {
  return integrate_endpoint([&X](double t, const Vec& x) { return X(t, x); }, t0, p, t1, cfg);
}

template <class Loop>
ProbeResult run_probe(const Loop& loop, const Vec& p, const Vec& expected, const ProbeOptions& opts) {
  validate(opts);
  ProbeResult r;
  r.epsilons = opts.epsilons;
  r.expected = expected;
  const std::size_t m = r.epsilons.size();
  auto guarded = [&loop](double eps) {
    try {
      return loop(eps);
    } catch (const IntegrationError& err) {
      std::ostringstream os;
      os << "probe failed at eps=" << eps << ": " << err.what();
      throw IntegrationError(os.str());
    }
  };
  r.endpoints.resize(m);
  if (opts.parallel) {
    std::vector<std::future<Vec>> jobs;
    for (double eps : r.epsilons) jobs.push_back(std::async(std::launch::async, guarded, eps));
    for (std::size_t i = 0; i < m; ++i) r.endpoints[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < m; ++i) r.endpoints[i] = guarded(r.epsilons[i]);
  }
  r.origin_defect = norm_inf(loop(0.0) - p);
  std::vector<double> defects;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = r.epsilons[i];
    r.scaled.push_back((r.endpoints[i] - p) / (e * e));
    defects.push_back(norm2(r.endpoints[i] - p));
  }
  r.extrapolated = richardson(r.epsilons, r.scaled, &r.table);
  r.level_difference = m >= 2 ? norm_inf(r.table[m - 1][0] - r.table[m - 2][1]) : 0.0;
  r.converged = m >= 2 && r.level_difference < opts.tolerance;
  r.convergence_order_estimate = loglog_slope(r.epsilons, defects);
  r.expected_error = norm_inf(r.extrapolated - r.expected);
  return r;
}

}  // namespace

Vec bracket_loop(const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e, double eps,
                 std::size_t substeps) {
  const double t = e.t;
  if (eps == 0.0) return e.x;
  const IntegratorConfig cfg = IntegratorConfig::rk4(eps / static_cast<double>(substeps));
  const Vec c1 = flow_endpoint(X, t, e.x, t + eps, cfg);
  const Vec c2 = flow_endpoint(Y, t + eps, c1, t + 2 * eps, cfg);
  const Vec c3 = flow_endpoint(X, t + 2 * eps, c2, t + eps, cfg);
  return flow_endpoint(Y, t + eps, c3, t, cfg);
}

ProbeResult bracket_probe(const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e,
                          const ProbeOptions& opts) {
  check_event(e, X.dim());
  if (Y.dim() != X.dim()) throw ModelError("bracket probe: field dimensions differ");
  return run_probe([&](double eps) { return bracket_loop(X, Y, e, eps, opts.substeps); }, e.x, td_bracket(X, Y, e),
                   opts);
}

Vec torsion_loop(const DotNabla& dn, const Event& e, const Vec& v0, const Vec& w0, double eps,
                 std::size_t substeps) {
  if (eps == 0.0) return e.x;
  const double t = e.t;
  const IntegratorConfig cfg = IntegratorConfig::rk4(eps / static_cast<double>(substeps));
  const GeodesicTransport l1 = geodesic_with_transport(dn, t, e.x, v0, t + eps, {w0}, cfg);
  const GeodesicTransport l2 = geodesic_with_transport(dn, t + eps, l1.x, l1.w[0], t + 2 * eps, {l1.v}, cfg);
  const GeodesicTransport l3 = geodesic_with_transport(dn, t + 2 * eps, l2.x, l2.w[0], t + eps, {l2.v}, cfg);
  const GeodesicTransport l4 = geodesic_with_transport(dn, t + eps, l3.x, l3.w[0], t, {}, cfg);
  return l4.x;
}

ProbeResult torsion_loop_probe(const DotNabla& dn, const Event& e, const Vec& v0, const Vec& w0,
                               const ProbeOptions& opts) {
  check_event(e, dn.dim());
  if (v0.size() != dn.dim() || w0.size() != dn.dim()) throw ModelError("torsion probe: vector dimension mismatch");
  const Vec expected =
      -1.0 * torsion_operator(dn, TimeDepVectorField::constant(v0), TimeDepVectorField::constant(w0), e);
  return run_probe([&](double eps) { return torsion_loop(dn, e, v0, w0, eps, opts.substeps); }, e.x, expected, opts);
}

}  // namespace tdg
