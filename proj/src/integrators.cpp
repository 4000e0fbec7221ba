#include "tdg/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tdg/errors.hpp"

namespace tdg {

const char* to_string(Method m) { return m == Method::rk4_fixed ? "rk4_fixed" : "dopri45_adaptive"; }

Method method_from_string(const std::string& s) {
  if (s == "rk4_fixed") return Method::rk4_fixed;
  if (s == "dopri45_adaptive") return Method::dopri45_adaptive;
  throw ModelError("unknown integrator method '" + s + "' (expected rk4_fixed or dopri45_adaptive)");
}

IntegratorConfig IntegratorConfig::rk4(double step, std::size_t max_steps) {
  IntegratorConfig c;
  c.method = Method::rk4_fixed;
  c.step = step;
  c.max_steps = max_steps;
  return c;
}

IntegratorConfig IntegratorConfig::dopri(double abs_tol, double rel_tol, std::size_t max_steps) {
  IntegratorConfig c;
  c.method = Method::dopri45_adaptive;
  c.abs_tol = abs_tol;
  c.rel_tol = rel_tol;
  c.max_steps = max_steps;
  return c;
}

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw ModelError("integrator step must be > 0");
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ModelError("integrator tolerances must be > 0");
  if (max_steps < 1) throw ModelError("integrator max_steps must be >= 1");
}

double IntegratorConfig::tolerance() const {
  return method == Method::rk4_fixed ? std::pow(step, 4) : std::max(abs_tol, rel_tol);
}

namespace {

bool finite(const Vec& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

[[noreturn]] void blow_up(double t) {
  std::ostringstream os;
  os.precision(17);
  os << "blow-up at t=" << t;
  throw IntegrationError(os.str());
}

[[noreturn]] void budget(std::size_t n, double t) {
  std::ostringstream os;
  os.precision(17);
  os << "integration budget exhausted after " << n << " steps at t=" << t;
  throw IntegrationError(os.str());
}

// A state this large means the solution is escaping; field evaluations that
// overflow there are reported as blow-up rather than as evaluation errors.
bool diverging(const Vec& y) {
  return std::any_of(y.begin(), y.end(), [](double v) { return std::abs(v) > 1e100; });
}

Vec eval(const OdeRhs& f, double t, const Vec& y) {
  Vec d;
  try {
    d = f(t, y);
  } catch (const EvaluationError&) {
    if (diverging(y)) blow_up(t);
    throw;
  }
  if (d.size() != y.size()) throw ModelError("right-hand side returned wrong dimension");
  if (!finite(d)) blow_up(t);
  return d;
}

OdeSolution rk4(const OdeRhs& f, double t0, const Vec& y0, double t1, const IntegratorConfig& cfg) {
  OdeSolution sol;
  Vec y = y0;
  Vec k1 = eval(f, t0, y);
  sol.t.push_back(t0);
  sol.y.push_back(y);
  sol.dy.push_back(k1);
  const double span = t1 - t0;
  if (span == 0.0) return sol;
  // Uniform steps that land exactly on t1.
  const auto n = static_cast<std::size_t>(std::ceil(std::abs(span) / cfg.step - 1e-12));
  const std::size_t steps = std::max<std::size_t>(n, 1);
  if (steps > cfg.max_steps) budget(cfg.max_steps, t0);
  const double h = span / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    const Vec k2 = eval(f, t + 0.5 * h, y + (0.5 * h) * k1);
    const Vec k3 = eval(f, t + 0.5 * h, y + (0.5 * h) * k2);
    const Vec k4 = eval(f, t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double tn = s + 1 == steps ? t1 : t0 + static_cast<double>(s + 1) * h;
    if (!finite(y)) blow_up(tn);
    k1 = eval(f, tn, y);
    sol.t.push_back(tn);
    sol.y.push_back(y);
    sol.dy.push_back(k1);
    ++sol.accepted;
  }
  return sol;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b̂
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, const IntegratorConfig& cfg) {
  double s = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sc;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(std::max<std::size_t>(err.size(), 1)));
}

double initial_step(const OdeRhs& f, double t0, const Vec& y0, const Vec& f0, double span,
                    const IntegratorConfig& cfg) {
  auto scaled = [&](const Vec& v, const Vec& ref) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double r = v[i] / (cfg.abs_tol + cfg.rel_tol * std::abs(ref[i]));
      s += r * r;
    }
    return std::sqrt(s / static_cast<double>(std::max<std::size_t>(v.size(), 1)));
  };
  const double d0 = scaled(y0, y0), d1 = scaled(f0, y0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, std::abs(span));
  const double dir = span > 0 ? 1.0 : -1.0;
  const Vec y1 = y0 + (dir * h0) * f0;
  const Vec f1 = eval(f, t0 + dir * h0, y1);
  const double d2 = scaled(f1 - f0, y0) / h0;
  const double m = std::max(d1, d2);
  const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, std::abs(span)});
}

OdeSolution dopri(const OdeRhs& f, double t0, const Vec& y0, double t1, const IntegratorConfig& cfg) {
  OdeSolution sol;
  Vec y = y0;
  Vec k1 = eval(f, t0, y);
  sol.t.push_back(t0);
  sol.y.push_back(y);
  sol.dy.push_back(k1);
  const double span = t1 - t0;
  if (span == 0.0) return sol;
  const double dir = span > 0 ? 1.0 : -1.0;
  double h = initial_step(f, t0, y, k1, span, cfg);
  double t = t0;
  const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t0), std::abs(t1));
  std::size_t attempts = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++attempts > cfg.max_steps) budget(cfg.max_steps, t);
    bool last = false;
    if (h >= std::abs(t1 - t)) {
      h = std::abs(t1 - t);
      last = true;
    }
    const double hs = dir * h;
    const Vec k2 = eval(f, t + c2 * hs, y + hs * (a21 * k1));
    const Vec k3 = eval(f, t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    const Vec k4 = eval(f, t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = eval(f, t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = eval(f, t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec yn = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double tn = last ? t1 : t + hs;
    // A non-finite trial state is treated as a rejected step; only a step
    // collapse below hmin is reported as blow-up.
    Vec k7 = yn;
    if (finite(yn)) {
      try {
        k7 = f(tn, yn);
      } catch (const EvaluationError&) {
        if (!diverging(yn)) throw;
        k7 = Vec(yn.size(), std::numeric_limits<double>::quiet_NaN());
      }
    }
    double en = std::numeric_limits<double>::infinity();
    if (finite(yn) && finite(k7))
      en = error_norm(hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7), y, yn, cfg);
    if (!std::isfinite(en)) en = 1e10;
    const double fac = std::clamp(0.9 * std::pow(std::max(en, 1e-16), -0.2), 0.2, 5.0);
    if (en <= 1.0) {
      t = tn;
      y = yn;
      k1 = k7;
      sol.t.push_back(t);
      sol.y.push_back(y);
      sol.dy.push_back(k1);
      ++sol.accepted;
      h *= fac;
    } else {
      ++sol.rejected;
      h *= std::min(1.0, fac);
      if (h < hmin) blow_up(t);
    }
  }
  return sol;
}

}  // namespace

OdeSolution integrate(const OdeRhs& f, double t0, const Vec& y0, double t1, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(t0) || !std::isfinite(t1)) throw ModelError("integration interval must be finite");
  if (!finite(y0)) throw ModelError("initial state has non-finite components");
  return cfg.method == Method::rk4_fixed ? rk4(f, t0, y0, t1, cfg) : dopri(f, t0, y0, t1, cfg);
}

Vec integrate_endpoint(const OdeRhs& f, double t0, const Vec& y0, double t1, const IntegratorConfig& cfg) {
  return integrate(f, t0, y0, t1, cfg).y.back();
}

}  // namespace tdg
