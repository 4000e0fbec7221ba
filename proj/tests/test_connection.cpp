#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "support.hpp"
#include "tdg/connection.hpp"
#include "tdg/models.hpp"
#include "tdg/operators.hpp"

using namespace tdg;
using doctest::Approx;

namespace {

TimeDepVectorField wavy(double a, double b) {
  return TimeDepVectorField::from_generic(2, [a, b](const auto& t, const auto& x) {
    using S = oracle::scalar_t<decltype(t)>;
    using std::cos, std::sin;
    return Vector<S>{a * sin(x[1] + t) + x[0] * x[0], b * cos(t) * x[0] - 0.3 * x[1] * t};
  });
}

}  // namespace

TEST_CASE("levi_civita: flat and spatially constant metrics give zero") {
  const ChristoffelEval e = levi_civita(euclidean_metric(3));
  CHECK(oracle::max_abs(e(0.4, Vec{1, 2, 3})) == 0.0);
  const ChristoffelEval c = levi_civita(conformal_plane_metric());
  for (double t : {-1.0, 0.0, 1.3}) CHECK(oracle::max_abs(c(t, Vec{0.2, -0.7})) == 0.0);
}

TEST_CASE("levi_civita: pendulum printed symbols, zero entries included") {
  const PendulumParams p = PendulumParams::defaults();
  const ChristoffelEval lc = levi_civita(pendulum_metric_autodiff(p));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ut(0.0, 10.0), ux(-1.5, 1.5);
  double worst = 0.0, g112 = 0.0;
  for (int s = 0; s < 100; ++s) {
    const double t = ut(rng);
    const Vec x{ux(rng), ux(rng)};
    const Tensor g = lc(t, x);
    worst = std::max(worst, oracle::max_abs(printed::christoffel(p, t, x), g));
    g112 = std::max({g112, std::abs(g(0, 0, 1)), std::abs(g(0, 1, 0))});
  }
  CHECK(worst < 1e-10);
  CHECK(g112 < 1e-15);
}

TEST_CASE("property: Levi-Civita symmetry and metric compatibility") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ut(0.3, 2.0), ux(-1.2, 1.2);
  for (const std::string& name : builtin_names()) {
    const MetricField m = builtin(name).metric;
    const ChristoffelEval lc = levi_civita(m);
    const std::size_t n = m.dim();
    double sym = 0.0, compat = 0.0;
    for (int s = 0; s < 30; ++s) {
      const double t = ut(rng);
      Vec x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = ux(rng);
      const Tensor G = lc(t, x);
      const Mat g = m.g(t, x);
      for (std::size_t k = 0; k < n; ++k) {
        const Mat dk = m.dg_dx(t, x, k);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            sym = std::max(sym, std::abs(G(k, i, j) - G(k, j, i)));
            double rhs = 0.0;
            for (std::size_t l = 0; l < n; ++l) rhs += g(l, j) * G(l, k, i) + g(i, l) * G(l, k, j);
            compat = std::max(compat, std::abs(dk(i, j) - rhs));
          }
      }
    }
    CHECK_MESSAGE(sym == 0.0, name);
    CHECK_MESSAGE(compat < 1e-8, name);
  }
}

TEST_CASE("gamma_dot: zero cases") {
  CHECK(oracle::max_abs(gamma_dot(levi_civita(euclidean_metric(2)))(0.5, Vec{1, 1})) == 0.0);
  CHECK(oracle::max_abs(gamma_dot(levi_civita(builtin("circle_scaling").metric))(0.7, Vec{2.0})) == 0.0);
  CHECK(gamma_dot_step(0.5) == 1e-5);
  CHECK(gamma_dot_step(-20.0) == Approx(2e-4));
}

TEST_CASE("gamma_dot: pendulum printed structure with the corrected W") {
  const PendulumParams p = PendulumParams::defaults();
  const Rank3Field gd = gamma_dot(levi_civita(pendulum_metric_autodiff(p)));
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ut(0.0, 10.0), ux(-1.5, 1.5);
  double fixed = 0.0, spec_candidate = 0.0;
  for (int s = 0; s < 100; ++s) {
    const double t = ut(rng);
    const Vec x{ux(rng), ux(rng)};
    fixed = std::max(fixed, oracle::max_abs(printed::christoffel_dot(p, t, x, printed::WChoice::m1_m2dot_minus_m1dot_m2),
                                            gd(t, x)));
    spec_candidate = std::max(
        spec_candidate,
        oracle::max_abs(printed::christoffel_dot(p, t, x, printed::WChoice::m1dot_m2_minus_m1_m2dot), gd(t, x)));
  }
  CHECK(fixed < 1e-12);
  CHECK(spec_candidate > 1e-2);  // opposite sign
  // As printed W vanishes identically.
  CHECK(printed::w_value(p, 1.3, printed::WChoice::as_printed) == 0.0);
}

TEST_CASE("gamma_dot: central-difference fallback agrees with the dual path") {
  const PendulumParams p = PendulumParams::defaults();
  const Rank3Field closed = gamma_dot(levi_civita(pendulum_metric(p)));
  const Rank3Field ad = gamma_dot(levi_civita(pendulum_metric_autodiff(p)));
  CHECK_FALSE(levi_civita(pendulum_metric(p)).has_lifted());
  CHECK(levi_civita(pendulum_metric_autodiff(p)).has_lifted());
  for (double t : {0.0, 1.1, 7.5}) CHECK(oracle::max_abs(closed(t, Vec{0.4, -1.0}), ad(t, Vec{0.4, -1.0})) < 1e-8);
}

TEST_CASE("property: Gamma_dot is a tensor, Gamma is not") {
  auto affine_psi = [](const auto& y) {
    using S = oracle::scalar_t<decltype(y[0])>;
    return Vector<S>{2.0 * y[0] + 0.5 * y[1] + 1.0, -0.3 * y[0] + y[1] - 2.0};
  };
  auto affine_jac = [](const auto& y) {
    using S = oracle::scalar_t<decltype(y[0])>;
    return Matrix<S>{{S(2.0), S(0.5)}, {S(-0.3), S(1.0)}};
  };
  auto shear = [](const auto& y) { return oracle::shear_psi(y); };
  auto shear_j = [](const auto& y) { return oracle::shear_jac(y); };
  const oracle::Chart sc = oracle::shear_chart();

  const MetricField pend = builtin("double_pendulum").metric;
  const MetricField conf = conformal_plane_metric();
  const ChristoffelEval lc_p = levi_civita(pend), lc_c = levi_civita(conf);
  const Rank3Field gd_p = gamma_dot(lc_p);

  const MetricField pend_aff = MetricField::from_generic(2, oracle::pulled_back(oracle::Pendulum{}, affine_psi, affine_jac));
  const MetricField pend_sh = MetricField::from_generic(2, oracle::pulled_back(oracle::Pendulum{}, shear, shear_j));
  const MetricField conf_sh = MetricField::from_generic(2, oracle::pulled_back(oracle::Conformal{}, shear, shear_j));

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ut(0.0, 3.0), uy(-0.8, 0.8);
  for (int s = 0; s < 20; ++s) {
    const double t = ut(rng);
    const Vec y{uy(rng), uy(rng)};
    // Affine: both transform as tensors.
    {
      const Vec x = affine_psi(y);
      const Mat J = affine_jac(y);
      CHECK(oracle::max_abs(gamma_dot(levi_civita(pend_aff))(t, y), oracle::tensor_law(gd_p(t, x), J)) < 1e-7);
      CHECK(oracle::max_abs(levi_civita(pend_aff)(t, y), oracle::tensor_law(lc_p(t, x), J)) < 1e-10);
    }
    // Nonlinear: Γ picks up exactly J⁻¹∂²ψ, Γ̇ does not.
    {
      const Vec x = sc.psi(y);
      const Mat J = sc.jac(y);
      const Tensor inh = oracle::inhomogeneous_term(sc.hess(y), J);
      CHECK(oracle::max_abs(gamma_dot(levi_civita(pend_sh))(t, y), oracle::tensor_law(gd_p(t, x), J)) < 1e-7);
      Tensor expected = oracle::tensor_law(lc_p(t, x), J);
      for (std::size_t i = 0; i < expected.raw().size(); ++i) expected.raw()[i] += inh.raw()[i];
      CHECK(oracle::max_abs(levi_civita(pend_sh)(t, y), expected) < 1e-10);
      CHECK(oracle::max_abs(levi_civita(conf_sh)(t, y), inh) < 1e-10);
      CHECK(oracle::max_abs(gamma_dot(levi_civita(conf_sh))(t, y)) < 1e-12);
    }
  }
}

TEST_CASE("metric_dotnabla examples") {
  const DotNabla e = metric_dotnabla(euclidean_metric(2));
  const Vec x{0.5, 0.5};
  CHECK(max_abs(e.A(1.0, x)) == 0.0);
  CHECK(max_abs(e.B(1.0, x)) == 0.0);
  CHECK(norm_inf(e.C(1.0, x)) == 0.0);

  const DotNabla c = metric_dotnabla(conformal_plane_metric());
  CHECK(max_abs_diff(c.A(0.3, x), Mat::identity(2)) < 1e-15);
  CHECK(max_abs_diff(c.B(-2.0, x), Mat::identity(2)) < 1e-15);
  CHECK(oracle::max_abs(c.gamma(0.3, x)) == 0.0);

  const PendulumParams p = PendulumParams::defaults();
  const DotNabla pd = metric_dotnabla(pendulum_metric_autodiff(p));
  CHECK(max_abs_diff(pd.A(1.2, x), 0.5 * printed::musical(p, 1.2, x, printed::Denominator::m2)) < 1e-14);
}

TEST_CASE("make_dotnabla checks dimensions") {
  CHECK_THROWS_AS(make_dotnabla(ChristoffelEval::zero(2), TimeDepVectorField::zero(3), MatrixField::zero(2),
                                MatrixField::zero(2)),
                  ModelError);
}

TEST_CASE("suspension_connection examples and the layout of Gamma-hat") {
  const ExtendedConnection circ = suspension_connection(builtin("circle_scaling").metric);
  for (double t : {0.5, 1.0, 3.0}) {
    CHECK(circ.eps(t, Vec{0.2})(0, 0) == Approx(-t));
    CHECK(circ.core.A(t, Vec{0.2})(0, 0) == Approx(1.0 / t));
    CHECK(circ.core.B(t, Vec{0.2})(0, 0) == Approx(1.0 / t));
  }
  const ExtendedConnection conf = suspension_connection(conformal_plane_metric());
  CHECK(max_abs_diff(conf.eps(0.4, Vec{0, 0}), -std::exp(0.8) * Mat::identity(2)) < 1e-14);

  const ExtendedConnection euc = suspension_connection(euclidean_metric(2));
  CHECK(max_abs(euc.eps(0.4, Vec{0, 0})) == 0.0);

  // Pendulum: Γ̂⁰_ij = −½ġ_ij, Γ̂ᵏ_i0 = Γ̂ᵏ_0i = ½ (G⁻¹Ġ)ᵏ_i, mixed time entries zero.
  const MetricField m = builtin("double_pendulum").metric;
  const ExtendedConnection pend = suspension_connection(m);
  const double t = 0.9;
  const Vec x{0.2, -0.6};
  const Tensor h = pend.christoffel_hat(t, x);
  const Mat gd = m.dg_dt(t, x), mus = musical_endomorphism(m, Event{t, x});
  const Tensor G = levi_civita(m)(t, x);
  CHECK(h.dim() == 3);
  CHECK(h(0, 0, 0) == 0.0);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(h(0, i + 1, 0) == 0.0);
    CHECK(h(0, 0, i + 1) == 0.0);
    CHECK(h(i + 1, 0, 0) == 0.0);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(h(0, i + 1, j + 1) == Approx(-0.5 * gd(i, j)));
      CHECK(h(i + 1, j + 1, 0) == Approx(0.5 * mus(i, j)));
      CHECK(h(i + 1, 0, j + 1) == Approx(0.5 * mus(i, j)));
      for (std::size_t k = 0; k < 2; ++k) CHECK(h(k + 1, i + 1, j + 1) == Approx(G(k, i, j)));
    }
  }
}

TEST_CASE("extended_cov_deriv examples") {
  const ExtendedConnection euc = suspension_connection(euclidean_metric(2));
  const ExtendedField dt{ScalarField::constant(2, 1.0), TimeDepVectorField::zero(2)};
  const SplitVector r = extended_cov_deriv(euc, dt, dt, Event{0.3, Vec{1, 2}});
  CHECK(r.horizontal == 0.0);
  CHECK(norm_inf(r.vertical) == 0.0);

  const ExtendedConnection conf = suspension_connection(conformal_plane_metric());
  const auto e1 = TimeDepVectorField::constant(Vec{1.0, 0.0});
  const SplitVector c = extended_cov_deriv(conf, suspension(e1), suspension(e1), Event{0.0, Vec{0.3, 0.3}});
  CHECK(norm_inf(c.vertical - Vec{2.0, 0.0}) < 1e-14);
  CHECK(c.horizontal == Approx(-1.0));  // ε(∂₁, ∂₁) = −½ġ₁₁ = −1 at t = 0
}

TEST_CASE("property: suspensions reproduce dotnabla and epsilon") {
  const MetricField m = builtin("double_pendulum").metric;
  const ExtendedConnection ec = suspension_connection(m);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = 0; s < 20; ++s) {
    const auto X = wavy(u(rng), u(rng)), Y = wavy(u(rng), u(rng));
    const Event e{1.0 + u(rng), Vec{u(rng), u(rng)}};
    const SplitVector r = extended_cov_deriv(ec, suspension(X), suspension(Y), e);
    const Vec xv = X(e.t, e.x), yv = Y(e.t, e.x);
    CHECK(std::abs(r.horizontal + 0.5 * bilinear(m.dg_dt(e.t, e.x), xv, yv)) < 1e-10);
    CHECK(norm_inf(r.vertical - dotnabla_apply(ec.core, X, Y, e)) < 1e-12);
  }
}

TEST_CASE("property: extended_cov_deriv equals the contraction with Gamma-hat on R x M") {
  // Independent route: ∇̂_X̂ Ŷ^μ = X̂^ν ∂_ν Ŷ^μ + Γ̂^μ_νρ X̂^ν Ŷ^ρ with ∂₀ = ∂/∂t.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double lam = u(rng);
  const Vec al{u(rng), u(rng)}, be{u(rng), u(rng)}, C{u(rng), u(rng)};
  const Mat eps{{u(rng), u(rng)}, {u(rng), u(rng)}}, A{{u(rng), u(rng)}, {u(rng), u(rng)}},
      B{{u(rng), u(rng)}, {u(rng), u(rng)}};
  const MetricField m = builtin("double_pendulum").metric;
  const ExtendedConnection ec =
      make_extended(ScalarField::constant(2, lam), CovectorField::constant(al), CovectorField::constant(be),
                    MatrixField::constant(eps),
                    make_dotnabla(levi_civita(m), TimeDepVectorField::constant(C), MatrixField::constant(A),
                                  MatrixField::constant(B)));
  const auto f0 = ScalarField::from_generic(2, [](const auto& t, const auto& x) {
    using std::sin;
    return 1.0 + 0.5 * sin(t * x[0]);
  });
  const auto g0 = ScalarField::from_generic(2, [](const auto& t, const auto& x) { return t - x[1] * x[0]; });
  const ExtendedField Xh{f0, wavy(0.4, -0.7)}, Yh{g0, wavy(-1.1, 0.2)};
  for (int s = 0; s < 10; ++s) {
    const Event e{u(rng) + 1.0, Vec{u(rng), u(rng)}};
    const SplitVector r = extended_cov_deriv(ec, Xh, Yh, e);
    const Tensor h = ec.christoffel_hat(e.t, e.x);
    const Vec Xv{f0(e.t, e.x), Xh.X(e.t, e.x)[0], Xh.X(e.t, e.x)[1]};
    const Vec Yv{g0(e.t, e.x), Yh.X(e.t, e.x)[0], Yh.X(e.t, e.x)[1]};
    // Directional derivative of Ŷ along X̂.
    const Vec grad_g0 = g0.grad_x(e.t, e.x);
    const Mat JY = Yh.X.jac_x(e.t, e.x);
    const Vec dY = Yh.X.dt(e.t, e.x);
    Vec dir(3);
    dir[0] = Xv[0] * g0.dt(e.t, e.x) + Xv[1] * grad_g0[0] + Xv[2] * grad_g0[1];
    for (std::size_t k = 0; k < 2; ++k) dir[k + 1] = Xv[0] * dY[k] + Xv[1] * JY(k, 0) + Xv[2] * JY(k, 1);
    const Vec full = dir + h.contract(Xv, Yv);
    CHECK(std::abs(full[0] - r.horizontal) < 1e-12);
    CHECK(std::abs(full[1] - r.vertical[0]) < 1e-12);
    CHECK(std::abs(full[2] - r.vertical[1]) < 1e-12);
  }
}

TEST_CASE("dotnabla_apply examples") {
  const DotNabla zero =
      make_dotnabla(ChristoffelEval::zero(2), TimeDepVectorField::zero(2), MatrixField::zero(2), MatrixField::zero(2));
  CHECK(norm_inf(dotnabla_apply(zero, wavy(1.0, 2.0), TimeDepVectorField::constant(Vec{3, 4}), Event{0.2, Vec{1, 1}})) ==
        0.0);
  const DotNabla conf = metric_dotnabla(conformal_plane_metric());
  for (double t : {-0.5, 0.0, 1.5})
    CHECK(norm_inf(dotnabla_apply(conf, TimeDepVectorField::zero(2), TimeDepVectorField::constant(Vec{1, 0}),
                                  Event{t, Vec{0.1, 0.1}}) -
                   Vec{1.0, 0.0}) < 1e-14);
}

TEST_CASE("property: Leibniz ledger holds as printed") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const MetricField m = builtin("double_pendulum").metric;
  for (int s = 0; s < 25; ++s) {
    const Mat A{{u(rng), u(rng)}, {u(rng), u(rng)}}, B{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const double c1 = u(rng), c2 = u(rng);
    const DotNabla dn = make_dotnabla(levi_civita(m), wavy(c1, c2), MatrixField::constant(A), MatrixField::constant(B));
    const auto X = wavy(u(rng), u(rng)), Y = wavy(u(rng), u(rng));
    const double k = u(rng);
    const auto f = ScalarField::from_generic(2, [k](const auto& t, const auto& x) {
      using std::exp, std::sin;
      return k * exp(0.3 * t) + sin(x[0] * x[1]);
    });
    const Event e{1.0 + u(rng), Vec{u(rng), u(rng)}};
    const double fv = f(e.t, e.x);
    const Vec lhs = dotnabla_apply(dn, X, f * Y, e);
    const Vec rhs = fv * dotnabla_apply(dn, X, Y, e) + lie_derivative_scalar(X, f, e) * Y(e.t, e.x) +
                    (1.0 - fv) * (dn.C(e.t, e.x) + dn.A(e.t, e.x) * X(e.t, e.x));
    CHECK(norm_inf(lhs - rhs) < 1e-12 * (1.0 + norm_inf(lhs)));
  }
}
