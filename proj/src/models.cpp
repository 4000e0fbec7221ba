#include "tdg/models.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <type_traits>

namespace tdg {

namespace {

using std::numbers::pi;

double param(const ModelParams& given, ModelParams& effective, const std::string& key, double fallback) {
  const auto it = given.find(key);
  const double v = it == given.end() ? fallback : it->second;
  effective[key] = v;
  return v;
}

void reject_unknown(const std::string& model, const ModelParams& given, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : given) {
    if (!allowed.count(k)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ModelError("model '" + model + "' has no parameter '" + k + "'" +
                       (list.empty() ? std::string(" (it takes none)") : " (expected one of: " + list + ")"));
    }
  }
}

MetricField constant_closed_form(const Mat& g, const std::string& label) {
  const std::size_t n = g.rows();
  return MetricField::closed_form(
      n, [g](double, const Vec&) { return g; }, [n](double, const Vec&, std::size_t) { return Mat::zero(n); },
      [n](double, const Vec&) { return Mat::zero(n); }, label);
}

}  // namespace

MetricField euclidean_metric(std::size_t n) {
  if (n == 0) throw ModelError("euclidean dimension must be at least 1");
  return MetricField::from_generic(
      n,
      [n](const auto& t, const auto&) {
        using S = std::remove_cvref_t<decltype(t)>;
        return Matrix<S>::identity(n);
      },
      "euclidean");
}

MetricField conformal_plane_metric() {
  return MetricField::from_generic(
      2,
      [](const auto& t, const auto&) {
        using S = std::remove_cvref_t<decltype(t)>;
        return exp(2.0 * t) * Matrix<S>::identity(2);
      },
      "conformal_plane");
}

EmbeddingFamily circle_scaling_family() {
  return EmbeddingFamily::from_generic(
      1, 2,
      [](const auto& t, const auto& p) {
        using S = std::remove_cvref_t<decltype(t)>;
        return Vector<S>{t * cos(p[0]), t * sin(p[0])};
      },
      "circle_scaling");
}

EmbeddingFamily circle_rotation_family(double omega) {
  return EmbeddingFamily::from_generic(
      1, 2,
      [omega](const auto& t, const auto& p) {
        using S = std::remove_cvref_t<decltype(t)>;
        const S a = p[0] - omega * t;
        return Vector<S>{cos(a), sin(a)};
      },
      "circle_rotation");
}

// Pendulum

PendulumParams PendulumParams::defaults() { return schedules(1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 0.5, 1.0, 9.81); }

PendulumParams PendulumParams::schedules(double l1, double l2, double a1, double b1, double w1, double a2, double b2,
                                         double w2, double g0) {
  PendulumParams p;
  p.l1 = l1;
  p.l2 = l2;
  p.g0 = g0;
  p.m1 = TimeFunction::from_generic([a1, b1, w1](const auto& t) { return a1 + b1 * sin(w1 * t); }, "m1");
  p.m2 = TimeFunction::from_generic([a2, b2, w2](const auto& t) { return a2 + b2 * cos(w2 * t); }, "m2");
  return p;
}

void PendulumParams::validate(double t0, double t1) const {
  if (!(l1 > 0.0) || !(l2 > 0.0)) throw ModelError("pendulum lengths must be > 0");
  if (!(g0 >= 0.0)) throw ModelError("pendulum g0 must be >= 0");
  for (int i = 0; i <= 1000; ++i) {
    const double t = t0 + (t1 - t0) * i / 1000.0;
    if (!(m1(t) > 0.0) || !(m2(t) > 0.0)) {
      std::ostringstream os;
      os << "pendulum mass not positive at t=" << t;
      throw ModelError(os.str());
    }
  }
}

MetricField pendulum_metric(const PendulumParams& p) {
  const double l1 = p.l1, l2 = p.l2;
  const TimeFunction m1 = p.m1, m2 = p.m2;
  auto g = [=](double t, const Vec& x) {
    const double a = m1(t), b = m2(t), c = std::cos(x[0] - x[1]);
    return Mat{{l1 * l1 * (a + b), l1 * l2 * b * c}, {l1 * l2 * b * c, l2 * l2 * b}};
  };
  auto dg_dx = [=](double t, const Vec& x, std::size_t k) {
    const double s = std::sin(x[0] - x[1]);
    const double off = (k == 0 ? -1.0 : 1.0) * l1 * l2 * m2(t) * s;
    return Mat{{0.0, off}, {off, 0.0}};
  };
  auto dg_dt = [=](double t, const Vec& x) {
    const double da = m1.derivative(t), db = m2.derivative(t), c = std::cos(x[0] - x[1]);
    return Mat{{l1 * l1 * (da + db), l1 * l2 * db * c}, {l1 * l2 * db * c, l2 * l2 * db}};
  };
  return MetricField::closed_form(2, g, dg_dx, dg_dt, "double_pendulum");
}

MetricField pendulum_metric_autodiff(const PendulumParams& p) {
  const double l1 = p.l1, l2 = p.l2;
  const TimeFunction m1 = p.m1, m2 = p.m2;
  return MetricField::from_generic(
      2,
      [=](const auto& t, const auto& x) {
        using S = std::remove_cvref_t<decltype(t)>;
        const S a = m1(t), b = m2(t), c = cos(x[0] - x[1]);
        Matrix<S> G(2, 2);
        G(0, 0) = l1 * l1 * (a + b);
        G(0, 1) = l1 * l2 * b * c;
        G(1, 0) = G(0, 1);
        G(1, 1) = l2 * l2 * b;
        return G;
      },
      "double_pendulum");
}

ScalarField pendulum_potential(const PendulumParams& p) {
  const double l1 = p.l1, l2 = p.l2, g0 = p.g0;
  const TimeFunction m1 = p.m1, m2 = p.m2;
  return ScalarField::from_generic(2, [=](const auto& t, const auto& x) {
    return g0 * (l1 * (m1(t) + m2(t)) * cos(x[0]) + l2 * m2(t) * cos(x[1]));
  });
}

namespace printed {

namespace {

struct State {
  double m1, m2, dm1, dm2, s, c, D;
};

State state(const PendulumParams& p, double t, const Vec& phi) {
  State st;
  st.m1 = p.m1(t);
  st.m2 = p.m2(t);
  st.dm1 = p.m1.derivative(t);
  st.dm2 = p.m2.derivative(t);
  st.s = std::sin(phi[0] - phi[1]);
  st.c = std::cos(phi[0] - phi[1]);
  st.D = st.m1 + st.m2 * st.s * st.s;
  return st;
}

double pick(const State& st, Denominator d) { return d == Denominator::m1 ? st.m1 : st.m2; }

}  // namespace

const char* to_string(Denominator d) { return d == Denominator::m1 ? "m1" : "m2"; }

const char* to_string(WChoice w) {
  switch (w) {
    case WChoice::as_printed:
      return "m1*m2dot - m1*m2dot (as printed)";
    case WChoice::m1dot_m2_minus_m1_m2dot:
      return "m1dot*m2 - m1*m2dot";
    case WChoice::m1_m2dot_minus_m1dot_m2:
      return "m1*m2dot - m1dot*m2";
  }
  return "?";
}

double w_value(const PendulumParams& p, double t, WChoice w) {
  const double m1 = p.m1(t), m2 = p.m2(t), dm1 = p.m1.derivative(t), dm2 = p.m2.derivative(t);
  switch (w) {
    case WChoice::as_printed:
      return m1 * dm2 - m1 * dm2;
    case WChoice::m1dot_m2_minus_m1_m2dot:
      return dm1 * m2 - m1 * dm2;
    case WChoice::m1_m2dot_minus_m1dot_m2:
      return m1 * dm2 - dm1 * m2;
  }
  return 0.0;
}

Mat inverse_metric(const PendulumParams& p, double t, const Vec& phi) {
  const State st = state(p, t, phi);
  const double k = 1.0 / (p.l1 * p.l1 * p.l2 * p.l2 * st.m2 * st.D);
  const double off = -p.l1 * p.l2 * st.m2 * st.c;
  return k * Mat{{p.l2 * p.l2 * st.m2, off}, {off, p.l1 * p.l1 * (st.m1 + st.m2)}};
}

Mat metric_dot(const PendulumParams& p, double t, const Vec& phi, Denominator den) {
  const State st = state(p, t, phi);
  const double b = st.m2;
  Mat G{{p.l1 * p.l1 * (st.m1 + b), p.l1 * p.l2 * b * st.c}, {p.l1 * p.l2 * b * st.c, p.l2 * p.l2 * b}};
  Mat r = (st.dm2 / st.m2) * G;
  r(0, 0) += p.l1 * p.l1 * (st.dm1 * st.m2 - st.m1 * st.dm2) / pick(st, den);
  return r;
}

Mat musical(const PendulumParams& p, double t, const Vec& phi, Denominator den) {
  const State st = state(p, t, phi);
  const double k = (st.dm1 * st.m2 - st.m1 * st.dm2) / (pick(st, den) * st.D);
  Mat r = (st.dm2 / st.m2) * Mat::identity(2);
  r(0, 0) += k;
  r(1, 0) += -k * (p.l1 / p.l2) * st.c;
  return r;
}

Tensor christoffel(const PendulumParams& p, double t, const Vec& phi) {
  const State st = state(p, t, phi);
  Tensor g(2);
  g(0, 0, 0) = st.m2 * st.c * st.s / st.D;
  g(0, 1, 1) = p.l2 * st.m2 * st.s / (p.l1 * st.D);
  g(1, 0, 0) = -p.l1 * (st.m1 + st.m2) * st.s / (p.l2 * st.D);
  g(1, 1, 1) = -st.m2 * st.c * st.s / st.D;
  return g;
}

Tensor christoffel_dot(const PendulumParams& p, double t, const Vec& phi, WChoice w) {
  const State st = state(p, t, phi);
  const double k = w_value(p, t, w) * st.s / (p.l1 * p.l2 * st.D * st.D);
  Tensor g(2);
  g(0, 0, 0) = k * p.l1 * p.l2 * st.c;
  g(1, 1, 1) = -k * p.l1 * p.l2 * st.c;
  g(1, 0, 0) = -k * p.l1 * p.l1 * st.c * st.c;
  g(0, 1, 1) = k * p.l2 * p.l2;
  return g;
}

Vec geodesic_accel(const PendulumParams& p, double t, const Vec& phi, const Vec& phidot) {
  const State st = state(p, t, phi);
  const double w1 = phidot[0], w2 = phidot[1];
  const double a1 = -st.m2 * st.s / (p.l1 * st.D) * (p.l1 * st.c * w1 * w1 + p.l2 * w2 * w2) -
                    (st.dm2 / st.m2 + (st.dm1 * st.m2 - st.m1 * st.dm2) / (st.m1 * st.D)) * w1;
  const double a2 = st.s / (p.l2 * st.D) * (p.l1 * (st.m1 + st.m2) * w1 * w1 + p.l2 * st.m2 * st.c * w2 * w2) -
                    st.dm2 / st.m2 * w2;
  return Vec{a1, a2};
}

}  // namespace printed

// Registry

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"euclidean", "conformal_plane", "circle_scaling", "circle_rotation",
                                              "double_pendulum"};
  return names;
}

ModelBundle builtin(const std::string& name, const ModelParams& params) {
  ModelBundle b;
  b.name = name;
  if (name == "euclidean") {
    reject_unknown(name, params, {"n"});
    const double nd = param(params, b.params, "n", 2.0);
    if (!(nd >= 1.0) || nd != std::floor(nd) || nd > 64) throw ModelError("euclidean: n must be an integer in [1, 64]");
    const auto n = static_cast<std::size_t>(nd);
    b.description = "flat metric Id on R^n, time-independent";
    b.metric = euclidean_metric(n);
    b.closed_form = constant_closed_form(Mat::identity(n), "euclidean");
    b.embedding = EmbeddingFamily::from_generic(n, n, [](const auto&, const auto& p) { return p; }, "identity");
  } else if (name == "conformal_plane") {
    reject_unknown(name, params, {});
    b.description = "g = exp(2t) Id on R^2";
    b.metric = conformal_plane_metric();
    b.closed_form = MetricField::closed_form(
        2, [](double t, const Vec&) { return std::exp(2 * t) * Mat::identity(2); },
        [](double, const Vec&, std::size_t) { return Mat::zero(2); },
        [](double t, const Vec&) { return 2 * std::exp(2 * t) * Mat::identity(2); }, "conformal_plane");
  } else if (name == "circle_scaling") {
    reject_unknown(name, params, {});
    b.description = "circle embedded as theta -> (t cos theta, t sin theta); g = t^2 dtheta^2";
    b.embedding = circle_scaling_family();
    b.metric = induced_metric(*b.embedding);
    b.closed_form = MetricField::closed_form(
        1, [](double t, const Vec&) { return Mat{{t * t}}; },
        [](double, const Vec&, std::size_t) { return Mat::zero(1); },
        [](double t, const Vec&) { return Mat{{2 * t}}; }, "circle_scaling");
  } else if (name == "circle_rotation") {
    reject_unknown(name, params, {"omega"});
    const double omega = param(params, b.params, "omega", 2 * pi);
    b.description = "circle embedded by clockwise rotation at angular rate omega; g = dtheta^2";
    b.embedding = circle_rotation_family(omega);
    b.metric = induced_metric(*b.embedding);
    b.closed_form = constant_closed_form(Mat::identity(1), "circle_rotation");
  } else if (name == "double_pendulum") {
    reject_unknown(name, params, {"l1", "l2", "g0", "m1_mean", "m1_amp", "m1_freq", "m2_mean", "m2_amp", "m2_freq"});
    const PendulumParams p = PendulumParams::schedules(
        param(params, b.params, "l1", 1.0), param(params, b.params, "l2", 1.0),
        param(params, b.params, "m1_mean", 2.0), param(params, b.params, "m1_amp", 1.0),
        param(params, b.params, "m1_freq", 1.0), param(params, b.params, "m2_mean", 1.0),
        param(params, b.params, "m2_amp", 0.5), param(params, b.params, "m2_freq", 1.0),
        param(params, b.params, "g0", 9.81));
    p.validate();
    b.description =
        "double pendulum, angles from the upward vertical; m1 = m1_mean + m1_amp sin(m1_freq t), "
        "m2 = m2_mean + m2_amp cos(m2_freq t)";
    b.metric = pendulum_metric_autodiff(p);
    b.closed_form = pendulum_metric(p);
    if (p.g0 > 0.0) b.potential = pendulum_potential(p);
  } else {
    std::string list;
    for (const auto& n : builtin_names()) list += (list.empty() ? "" : ", ") + n;
    throw ModelError("unknown model '" + name + "'; available models: " + list);
  }
  return b;
}

}  // namespace tdg
