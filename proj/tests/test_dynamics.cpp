#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "support.hpp"
#include "tdg/dynamics.hpp"
#include "tdg/models.hpp"

using namespace tdg;
using doctest::Approx;

namespace {

const IntegratorConfig tight = IntegratorConfig::dopri(1e-10, 1e-10);

Trajectory sampled(const std::function<Vec(double)>& x, const std::function<Vec(double)>& v, double t0, double t1,
                   std::size_t m = 201) {
  std::vector<double> t;
  std::vector<Vec> xs, vs;
  for (std::size_t k = 0; k < m; ++k) {
    const double tk = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(m - 1);
    t.push_back(tk);
    xs.push_back(x(tk));
    vs.push_back(v(tk));
  }
  return Trajectory(t, xs, vs);
}

TimeDepVectorField nonlinear_field(double a, double b, double c) {
  return TimeDepVectorField::from_generic(2, [a, b, c](const auto& t, const auto& x) {
    using S = oracle::scalar_t<decltype(t)>;
    using std::cos, std::sin;
    return Vector<S>{a * sin(x[1]) * cos(t) + 0.2 * x[0], b * x[0] * x[0] * 0.3 + c * sin(2.0 * t)};
  });
}

// Time-independent, spatially curved.
MetricField bumpy() {
  return MetricField::from_generic(2, [](const auto& t, const auto& x) {
    using S = oracle::scalar_t<decltype(t)>;
    return Matrix<S>{{1.0 + x[0] * x[0], 0.3 * x[1]}, {0.3 * x[1], S(2.0)}};
  });
}

}  // namespace

TEST_CASE("flow examples") {
  const Trajectory z = flow(TimeDepVectorField::zero(2), 0.0, Vec{1, 2}, 3.0, tight);
  for (std::size_t k = 0; k < z.size(); ++k) CHECK(norm_inf(z.x(k) - Vec{1, 2}) == 0.0);

  const auto X = TimeDepVectorField::from_generic(1, [](const auto& t, const auto&) {
    using S = oracle::scalar_t<decltype(t)>;
    return Vector<S>{t};
  });
  const Trajectory f = flow(X, 0.0, Vec{0.0}, 1.0, tight);
  CHECK(f.x_back()[0] == Approx(0.5).epsilon(1e-10));
  CHECK(f.v_back()[0] == Approx(1.0).epsilon(1e-12));
  CHECK(f.position(0.5)[0] == Approx(0.125).epsilon(1e-8));

  // Backward integration from x(1) = 0.5.
  CHECK(std::abs(flow(X, 1.0, Vec{0.5}, 0.0, tight).x_back()[0]) < 1e-10);
}

TEST_CASE("flow_tangent: zero field and the matrix exponential") {
  CHECK(norm_inf(flow_tangent(TimeDepVectorField::zero(2), 0.0, Vec{1, 1}, 2.0, Vec{3, -4}, tight) - Vec{3, -4}) == 0.0);
  const Mat M{{0.2, -1.0}, {0.7, -0.3}};
  const auto X = TimeDepVectorField::from_generic(2, [M](const auto& t, const auto& x) {
    using S = oracle::scalar_t<decltype(t)>;
    return Vector<S>{M(0, 0) * x[0] + M(0, 1) * x[1], M(1, 0) * x[0] + M(1, 1) * x[1]};
  });
  const Mat E = oracle::expm(1.5 * M);
  for (std::size_t k = 0; k < 2; ++k) {
    const Vec w = flow_tangent(X, 0.5, Vec{0.3, 0.1}, 2.0, Vec::unit(2, k), tight);
    CHECK(std::abs(w[0] - E(0, k)) < 1e-8);
    CHECK(std::abs(w[1] - E(1, k)) < 1e-8);
  }
}

TEST_CASE("flow: derivative in the initial time equals -T Phi X(t0, p)") {
  const auto X = nonlinear_field(1.0, -1.0, 0.5);
  const Vec p{0.4, -0.2};
  const double t0 = 0.3, t1 = 1.4, h = 1e-4;
  const auto endpoint = [&](double s) { return flow(X, s, p, t1, tight).x_back(); };
  const Vec fd = oracle::central(endpoint, t0, h);
  const Vec expect = -1.0 * flow_tangent(X, t0, p, t1, X(t0, p), tight);
  CHECK(norm_inf(fd - expect) < 1e-6);
}

TEST_CASE("property: flow group law and backward consistency") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0), um(0.1, 1.9);
  for (int s = 0; s < 15; ++s) {
    const auto X = nonlinear_field(u(rng), u(rng), u(rng));
    const Vec p{u(rng), u(rng)};
    const double mid = um(rng);
    const Vec a = flow(X, 0.0, p, mid, tight).x_back();
    const Vec b = flow(X, mid, a, 2.0, tight).x_back();
    CHECK(norm_inf(b - flow(X, 0.0, p, 2.0, tight).x_back()) < 10 * tight.tolerance());
    CHECK(norm_inf(flow(X, mid, a, 0.0, tight).x_back() - p) < 10 * tight.tolerance());
  }
}

TEST_CASE("integrator errors and the empty interval") {
  const auto X = nonlinear_field(1.0, 1.0, 1.0);
  IntegratorConfig small = tight;
  small.max_steps = 3;
  try {
    flow(X, 0.0, Vec{0.1, 0.1}, 5.0, small);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(std::string(e.what()).find("integration budget exhausted") != std::string::npos);
  }
  // ẋ = x² from x = 1 leaves every bound at t = 1.
  const auto blow = TimeDepVectorField::from_generic(1, [](const auto&, const auto& x) {
    using S = oracle::scalar_t<decltype(x[0])>;
    return Vector<S>{x[0] * x[0]};
  });
  try {
    flow(blow, 0.0, Vec{1.0}, 2.0, IntegratorConfig::rk4(0.01));
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(std::string(e.what()).find("blow-up at t=") != std::string::npos);
  }
  const Trajectory one = flow(X, 0.7, Vec{0.1, 0.2}, 0.7, tight);
  CHECK(one.size() == 1);
  CHECK(norm_inf(one.x(0) - Vec{0.1, 0.2}) == 0.0);

  CHECK_THROWS_AS(IntegratorConfig::rk4(0.0).validate(), ModelError);
  CHECK_THROWS_AS(IntegratorConfig::dopri(-1.0, 1e-8).validate(), ModelError);
  CHECK_THROWS_AS(IntegratorConfig::dopri(1e-8, 1e-8, 0).validate(), ModelError);
}

TEST_CASE("property: integration is deterministic") {
  const MetricField m = builtin("double_pendulum").metric;
  const Trajectory a = geodesic_metric(m, 0.0, Vec{0.3, -0.1}, Vec{1.0, 0.5}, 2.0, tight);
  const Trajectory b = geodesic_metric(m, 0.0, Vec{0.3, -0.1}, Vec{1.0, 0.5}, 2.0, tight);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.t(k) == b.t(k));
    CHECK(norm_inf(a.x(k) - b.x(k)) == 0.0);
  }
}

TEST_CASE("geodesic_metric: straight lines, conformal closed form, RK4 order") {
  const Trajectory line = geodesic_metric(euclidean_metric(2), 1.0, Vec{1, 2}, Vec{-1, 0.5}, 3.0, tight);
  CHECK(norm_inf(line.x_back() - Vec{-1, 3}) < 1e-12);

  const MetricField m = conformal_plane_metric();
  const Vec x0{1.0, 2.0}, v0{0.3, -0.4};
  const Vec exact = x0 + ((1.0 - std::exp(-2.0)) / 2.0) * v0;
  CHECK(norm_inf(geodesic_metric(m, 0.5, x0, v0, 1.5, tight).x_back() - exact) < 1e-8);
  const double e1 = norm_inf(geodesic_metric(m, 0.5, x0, v0, 1.5, IntegratorConfig::rk4(0.1)).x_back() - exact);
  const double e2 = norm_inf(geodesic_metric(m, 0.5, x0, v0, 1.5, IntegratorConfig::rk4(0.05)).x_back() - exact);
  CHECK(e1 / e2 >= 12.0);
  CHECK(e1 / e2 <= 20.0);
}

TEST_CASE("geodesic_metric: pendulum right-hand side against the printed equations") {
  // Constant masses: the printed φ̈ equations agree. Varying masses: the
  // printed φ̈₂ lacks a Ġ term, so they must not.
  const PendulumParams pc = PendulumParams::schedules(1, 1, 2, 0, 1, 1, 0, 1, 9.81);
  const PendulumParams pv = PendulumParams::defaults();
  const MetricField mc = pendulum_metric(pc), mv = pendulum_metric(pv);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.5, 1.5), ut(0.0, 10.0);
  double worst_const = 0.0, worst_var = 0.0;
  for (int s = 0; s < 100; ++s) {
    const double t = ut(rng);
    const Vec x{u(rng), u(rng)}, v{u(rng), u(rng)};
    worst_const = std::max(worst_const, norm_inf(geodesic_metric_accel(mc, t, x, v) - printed::geodesic_accel(pc, t, x, v)));
    worst_var = std::max(worst_var, norm_inf(geodesic_metric_accel(mv, t, x, v) - printed::geodesic_accel(pv, t, x, v)));
  }
  CHECK(worst_const < 1e-12);
  CHECK(worst_var > 1e-2);
}

TEST_CASE("geodesic_dotnabla examples") {
  const DotNabla flat =
      make_dotnabla(ChristoffelEval::zero(2), TimeDepVectorField::zero(2), MatrixField::zero(2), MatrixField::zero(2));
  CHECK(norm_inf(geodesic_dotnabla(flat, 0.0, Vec{0, 0}, Vec{1, 2}, 2.0, tight).x_back() - Vec{2, 4}) < 1e-12);

  const DotNabla damp = make_dotnabla(ChristoffelEval::zero(2), TimeDepVectorField::zero(2),
                                      MatrixField::constant(0.5 * Mat::identity(2)),
                                      MatrixField::constant(0.5 * Mat::identity(2)));
  const Trajectory tr = geodesic_dotnabla(damp, 1.0, Vec{0, 0}, Vec{1, -2}, 3.0, tight);
  for (std::size_t k = 0; k < tr.size(); ++k)
    CHECK(norm_inf(tr.v(k) - std::exp(-(tr.t(k) - 1.0)) * Vec{1, -2}) < 1e-9);

  const MetricField m = builtin("double_pendulum").metric;
  const IntegratorConfig cfg = IntegratorConfig::dopri(1e-11, 1e-11);
  const Vec a = geodesic_metric(m, 0.0, Vec{0.3, -0.1}, Vec{1.0, 0.2}, 3.0, cfg).x_back();
  const Vec b = geodesic_dotnabla(metric_dotnabla(m), 0.0, Vec{0.3, -0.1}, Vec{1.0, 0.2}, 3.0, cfg).x_back();
  CHECK(norm_inf(a - b) < 1e-8);
}

TEST_CASE("geodesic_suspension: decoupling, isotropic data and witness") {
  const MetricField b = bumpy();
  const Trajectory s = geodesic_suspension(b, 0.0, Vec{0.2, 0.1}, Vec{0.5, 0.3}, 1.0, tight);
  const Trajectory g = geodesic_metric(b, 0.0, Vec{0.2, 0.1}, Vec{0.5, 0.3}, 1.0, tight);
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(std::abs(s.x(k)[0] - s.t(k)) < 1e-12);
    CHECK(norm_inf(Vec{s.x(k)[1], s.x(k)[2]} - g.position(s.t(k))) < 1e-8);
  }

  const MetricField iso = MetricField::from_generic(2, oracle::Isotropic{});
  const Trajectory si = geodesic_suspension(iso, 0.0, Vec{0.3, 0.2}, Vec{1.0, 0.0}, 1.0, tight);
  const Trajectory gi = geodesic_metric(iso, 0.0, Vec{0.3, 0.2}, Vec{1.0, 0.0}, 1.0, tight);
  for (std::size_t k = 0; k < si.size(); ++k) {
    CHECK(std::abs(si.x(k)[0] - si.t(k)) < 1e-6);
    CHECK(norm_inf(Vec{si.x(k)[1], si.x(k)[2]} - gi.position(si.t(k))) < 1e-6);
  }

  // ġ(v, v) > 0 pushes γ⁰ ahead of s.
  const Trajectory w = geodesic_suspension(conformal_plane_metric(), 0.0, Vec{0, 0}, Vec{1, 0}, 1.0, tight);
  double prev = 0.0;
  for (std::size_t k = 1; k < w.size(); ++k) {
    const double d = w.x(k)[0] - w.t(k);
    CHECK(d > prev - 1e-14);
    prev = d;
  }
  CHECK(prev > 1e-3);
}

TEST_CASE("forced_geodesic: constant potential, oscillator, pendulum energy") {
  const MetricField m = bumpy();
  const auto c = ScalarField::constant(2, 7.0);
  CHECK(norm_inf(forced_geodesic(m, c, 0.0, Vec{0.1, 0.2}, Vec{1, 0}, 1.0, tight).x_back() -
                 geodesic_metric(m, 0.0, Vec{0.1, 0.2}, Vec{1, 0}, 1.0, tight).x_back()) == 0.0);

  const auto V = ScalarField::from_generic(1, [](const auto&, const auto& x) { return 0.5 * x[0] * x[0]; });
  const Trajectory osc = forced_geodesic(euclidean_metric(1), V, 0.0, Vec{1.0}, Vec{0.0}, oracle::pi, tight);
  CHECK(osc.x_back()[0] == Approx(-1.0).epsilon(1e-8));
  // The opposite sign makes the origin repelling.
  const Trajectory rep =
      forced_geodesic(euclidean_metric(1), V, 0.0, Vec{1.0}, Vec{0.0}, 1.0, tight, ForceConvention::as_printed);
  CHECK(rep.x_back()[0] == Approx(std::cosh(1.0)).epsilon(1e-8));

  const PendulumParams p = PendulumParams::schedules(1, 1, 2, 0, 1, 1, 0, 1, 9.81);
  const MetricField pm = pendulum_metric(p);
  const ScalarField pv = pendulum_potential(p);
  const Trajectory tr = forced_geodesic(pm, pv, 0.0, Vec{0.5, -0.3}, Vec{0, 0}, 10.0, tight);
  auto energy = [&](std::size_t k) {
    return 0.5 * bilinear(pm.g(tr.t(k), tr.x(k)), tr.v(k), tr.v(k)) + pv(tr.t(k), tr.x(k));
  };
  double drift = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) drift = std::max(drift, std::abs(energy(k) - energy(0)));
  CHECK(drift < 1e-6);
}

TEST_CASE("parallel_transport examples") {
  const DotNabla flat =
      make_dotnabla(ChristoffelEval::zero(2), TimeDepVectorField::zero(2), MatrixField::zero(2), MatrixField::zero(2));
  const auto circle = [](double t) { return Vec{std::cos(t), std::sin(t)}; };
  const auto circle_v = [](double t) { return Vec{-std::sin(t), std::cos(t)}; };
  CHECK(norm_inf(parallel_transport(flat, circle, circle_v, 0.0, 2.0, Vec{1, 2}, tight).back() - Vec{1, 2}) < 1e-14);

  const DotNabla conf = metric_dotnabla(conformal_plane_metric());
  const SampledVector w = parallel_transport(
      conf, [](double) { return Vec{0.5, 0.5}; }, [](double) { return Vec{0.0, 0.0}; }, 0.5, 2.5, Vec{2, -1}, tight);
  for (std::size_t k = 0; k < w.size(); ++k)
    CHECK(norm_inf(w.w(k) - std::exp(-(w.t(k) - 0.5)) * Vec{2, -1}) < 1e-9);
}

TEST_CASE("property: transport preserves g(w, w) for time-independent metrics") {
  const MetricField m = bumpy();
  const DotNabla dn = metric_dotnabla(m);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = 0; s < 10; ++s) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const auto gam = [=](double t) { return Vec{a * std::sin(t) + c, b * t * t}; };
    const auto gam_v = [=](double t) { return Vec{a * std::cos(t), 2 * b * t}; };
    const Vec w0{u(rng), u(rng)};
    const SampledVector w = parallel_transport(dn, gam, gam_v, 0.0, 2.0, w0, tight);
    const double n0 = bilinear(m.g(0.0, gam(0.0)), w0, w0);
    for (std::size_t k = 0; k < w.size(); ++k)
      CHECK(std::abs(bilinear(m.g(w.t(k), gam(w.t(k))), w.w(k), w.w(k)) - n0) < 1e-8);
  }
}

TEST_CASE("transport along a sampled geodesic agrees with the joint integration") {
  const MetricField m = builtin("double_pendulum").metric;
  const DotNabla dn = metric_dotnabla(m);
  const IntegratorConfig cfg = IntegratorConfig::dopri(1e-11, 1e-11);
  const Trajectory base = geodesic_dotnabla(dn, 0.0, Vec{0.3, -0.1}, Vec{1, 0}, 1.0, cfg);
  const Vec a = parallel_transport(dn, base, Vec{0, 1}, cfg).back();
  const GeodesicTransport j = geodesic_with_transport(dn, 0.0, Vec{0.3, -0.1}, Vec{1, 0}, 1.0, {Vec{0, 1}}, cfg);
  CHECK(norm_inf(a - j.w[0]) < 1e-7);
  CHECK(norm_inf(base.x_back() - j.x) < 1e-9);
}

TEST_CASE("functionals: circle lengths and the constant path") {
  const ModelBundle sc = builtin("circle_scaling");
  const auto gamma = sampled([](double t) { return Vec{2 * oracle::pi * t}; },
                             [](double) { return Vec{2 * oracle::pi}; }, 0.0, 1.0);
  CHECK(functionals(sc.metric, gamma).length == Approx(oracle::pi).epsilon(1e-9));
  // ∫₀¹ √(1 + a²t²) dt = ½(√(1 + a²) + asinh(a)/a), a = 2π
  const double a = 2 * oracle::pi;
  const double emb = 0.5 * (std::sqrt(1 + a * a) + std::asinh(a) / a);
  CHECK(std::abs(embedded_length(*sc.embedding, gamma) - emb) < 1e-8);
  CHECK(std::abs(emb - 3.383044) < 1e-6);

  const ModelBundle rot = builtin("circle_rotation");
  CHECK(functionals(rot.metric, gamma).length == Approx(2 * oracle::pi).epsilon(1e-9));
  CHECK(std::abs(embedded_length(*rot.embedding, gamma)) < 1e-6);

  const auto still = sampled([](double) { return Vec{0.0}; }, [](double) { return Vec{0.0}; }, 0.0, 1.0);
  const FunctionalReport r = functionals(sc.metric, still);
  CHECK(r.energy == 0.0);
  CHECK(r.length == 0.0);
  CHECK(embedded_length(*sc.embedding, still) == Approx(1.0).epsilon(1e-12));

  // Degenerate interval.
  const Trajectory pt(std::vector<double>{0.5}, std::vector<Vec>{Vec{1.0}}, std::vector<Vec>{Vec{3.0}});
  CHECK(functionals(sc.metric, pt).length == 0.0);
  CHECK(functionals(sc.metric, pt).energy == 0.0);
}

TEST_CASE("functionals: energy against an independent quadrature") {
  // Conformal plane, γ(t) = (t, t²): E = ∫ ½ e^{2t}(1 + 4t²) dt on [0, 1].
  const auto path = sampled([](double t) { return Vec{t, t * t}; }, [](double t) { return Vec{1.0, 2 * t}; }, 0.0, 1.0);
  const double e2 = std::exp(2.0);
  // ∫ e^{2t} dt = (e²−1)/2, ∫ t² e^{2t} dt = (e²(2−2+1) − 1)/4 = (e² − 1)/4
  const double exact = 0.5 * ((e2 - 1.0) / 2.0 + 4.0 * (e2 - 1.0) / 4.0);
  CHECK(functionals(conformal_plane_metric(), path).energy == Approx(exact).epsilon(1e-8));
}

TEST_CASE("property: Cauchy-Schwarz between length and energy") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const MetricField m = builtin("double_pendulum").metric;
  for (int s = 0; s < 20; ++s) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const auto path = sampled([=](double t) { return Vec{a * std::sin(2 * t), b * t + c * t * t}; },
                              [=](double t) { return Vec{2 * a * std::cos(2 * t), b + 2 * c * t}; }, 0.0, 2.0);
    const FunctionalReport r = functionals(m, path);
    CHECK(r.length * r.length <= 2.0 * 2.0 * r.energy * (1 + 1e-9));
  }
}

TEST_CASE("property: energy-critical residual and kinetic identities along geodesics") {
  const MetricField m = builtin("double_pendulum").metric;
  const oracle::Pendulum g;
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = 0; s < 5; ++s) {
    const Vec x0{u(rng), u(rng)}, v0{u(rng), u(rng)};
    const Trajectory tr = geodesic_metric(m, 0.0, x0, v0, 2.0, tight);
    CHECK(functionals(m, tr).el_residual_max < 100 * tight.tolerance());
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const auto [T, rate] = oracle::kinetic_and_rate(g, tr.t(k), tr.x(k), tr.v(k), tr.a(k));
      CHECK(std::abs(rate + 0.5 * oracle::gdot_vv(g, tr.t(k), tr.x(k), tr.v(k))) < 1e-7);
      CHECK(std::abs(rate - kinetic_rate(m, tr.t(k), tr.x(k), tr.v(k), tr.a(k))) < 1e-9);
    }
  }
}

TEST_CASE("el_residual skips samples where g degenerates") {
  const auto gamma = sampled([](double t) { return Vec{2 * oracle::pi * t}; },
                             [](double) { return Vec{2 * oracle::pi}; }, 0.0, 1.0);
  CHECK(functionals(builtin("circle_scaling").metric, gamma).el_skipped == 1);
}

TEST_CASE("length_critical_residual") {
  // Constant speed geodesic of a time-independent metric: both equations agree.
  const MetricField b = bumpy();
  const Trajectory tr = geodesic_metric(b, 0.0, Vec{0.2, 0.1}, Vec{0.5, 0.3}, 2.0, tight);
  CHECK(length_critical_residual(b, tr) < 1e-6);

  // Conformal geodesic: T decays, the residual is finite and nonzero.
  const Trajectory c = geodesic_metric(conformal_plane_metric(), 0.0, Vec{0, 0}, Vec{1, 0}, 1.0, tight);
  const double r = length_critical_residual(conformal_plane_metric(), c);
  CHECK(std::isfinite(r));
  CHECK(r > 1e-3);

  const auto still = sampled([](double) { return Vec{0.0, 0.0}; }, [](double) { return Vec{0.0, 0.0}; }, 0.0, 1.0);
  try {
    length_critical_residual(b, still);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("stationary point on path") != std::string::npos);
  }
}
