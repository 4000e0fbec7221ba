#include "tdg/connection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tdg {

namespace {

void require_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got)
    throw ModelError(std::string(what) + ": dimension " + std::to_string(got) + ", expected " +
                     std::to_string(expected));
}

}  // namespace

Rank3Field::Rank3Field(std::size_t dim, Eval eval, LiftedEval lifted)
    : dim_(dim), eval_(std::move(eval)), lifted_(std::move(lifted)) {}

Rank3Field Rank3Field::zero(std::size_t dim) { return constant(Tensor(dim)); }

Rank3Field Rank3Field::constant(const Tensor& c) {
  return Rank3Field(
      c.dim(), [c](double, const Vec&) { return c; },
      [c](const Dual1&, const Vector<Dual1>&) {
        Tensor3<Dual1> r(c.dim());
        for (std::size_t i = 0; i < c.raw().size(); ++i) r.raw()[i] = Dual1(c.raw()[i]);
        return r;
      });
}

Tensor Rank3Field::operator()(double t, const Vec& x) const {
  require_dim(dim_, x.size(), "rank-3 field argument");
  Tensor r = eval_(t, x);
  require_dim(dim_, r.dim(), "rank-3 field value");
  for (double v : r.raw())
    if (!std::isfinite(v)) throw EvaluationError("non-finite connection coefficient", t, x);
  return r;
}

Tensor3<Dual1> Rank3Field::lifted(const Dual1& t, const Vector<Dual1>& x) const {
  if (!lifted_) throw ModelError("rank-3 field has no lifted evaluator");
  return lifted_(t, x);
}

ChristoffelEval levi_civita(const MetricField& m) {
  const std::size_t n = m.dim();
  if (m.has_generic()) {
    return ChristoffelEval(
        n, [m](double t, const Vec& x) { return levi_civita_at(m.jet_at<double>(t, x), t, x); },
        [m](const Dual1& t, const Vector<Dual1>& x) {
          return levi_civita_at(m.jet_at<Dual1>(t, x), t.val, values_of(x));
        });
  }
  return ChristoffelEval(n, [m](double t, const Vec& x) { return levi_civita_at(m.jet(t, x), t, x); });
}

double gamma_dot_step(double t) { return 1e-5 * std::max(1.0, std::abs(t)); }

Rank3Field gamma_dot(const ChristoffelEval& gamma) {
  const std::size_t n = gamma.dim();
  if (gamma.has_lifted()) {
    return Rank3Field(n, [gamma, n](double t, const Vec& x) {
      const Tensor3<Dual1> r = gamma.lifted(make_dual(t, 1.0), seed_constant(x));
      Tensor out(n);
      for (std::size_t i = 0; i < r.raw().size(); ++i) out.raw()[i] = r.raw()[i].der;
      return out;
    });
  }
  return Rank3Field(n, [gamma, n](double t, const Vec& x) {
    const double h = gamma_dot_step(t);
    const Tensor up = gamma(t + h, x);
    const Tensor dn = gamma(t - h, x);
    Tensor out(n);
    for (std::size_t i = 0; i < out.raw().size(); ++i) out.raw()[i] = (up.raw()[i] - dn.raw()[i]) / (2.0 * h);
    return out;
  });
}

DotNabla make_dotnabla(ChristoffelEval gamma, TimeDepVectorField C, EndomorphismField A, EndomorphismField B) {
  const std::size_t n = gamma.dim();
  require_dim(n, C.dim(), "C");
  require_dim(n, A.dim(), "A");
  require_dim(n, B.dim(), "B");
  return DotNabla{std::move(gamma), std::move(C), std::move(A), std::move(B)};
}

DotNabla metric_dotnabla(const MetricField& m) {
  const std::size_t n = m.dim();
  EndomorphismField half(n, [m](double t, const Vec& x) { return 0.5 * musical_endomorphism(m, Event{t, x}); });
  return make_dotnabla(levi_civita(m), TimeDepVectorField::zero(n), half, half);
}

Tensor ExtendedConnection::christoffel_hat(double t, const Vec& x) const {
  const std::size_t n = dim();
  const Tensor g = core.gamma(t, x);
  const Vec c = core.C(t, x);
  const Mat a = core.A(t, x);
  const Mat b = core.B(t, x);
  const Vec al = alpha(t, x);
  const Vec be = beta(t, x);
  const Mat ep = eps(t, x);
  Tensor h(n + 1);
  h(0, 0, 0) = lambda(t, x);
  for (std::size_t i = 0; i < n; ++i) {
    h(0, i + 1, 0) = al[i];
    h(0, 0, i + 1) = be[i];
    h(i + 1, 0, 0) = c[i];
    for (std::size_t j = 0; j < n; ++j) {
      h(0, i + 1, j + 1) = ep(i, j);
      // A acts on the differentiating direction, B on the differentiated one.
      h(i + 1, j + 1, 0) = a(i, j);
      h(i + 1, 0, j + 1) = b(i, j);
      for (std::size_t k = 0; k < n; ++k) h(i + 1, j + 1, k + 1) = g(i, j, k);
    }
  }
  return h;
}

ExtendedConnection make_extended(ScalarField lambda, CovectorField alpha, CovectorField beta, CovariantTwoField eps,
                                 DotNabla core) {
  const std::size_t n = core.dim();
  require_dim(n, lambda.dim(), "lambda");
  require_dim(n, alpha.dim(), "alpha");
  require_dim(n, beta.dim(), "beta");
  require_dim(n, eps.dim(), "epsilon");
  return ExtendedConnection{std::move(lambda), std::move(alpha), std::move(beta), std::move(eps), std::move(core)};
}

ExtendedConnection suspension_connection(const MetricField& m) {
  const std::size_t n = m.dim();
  CovariantTwoField eps(n, [m](double t, const Vec& x) { return -0.5 * m.dg_dt(t, x); });
  return make_extended(ScalarField::constant(n, 0.0), CovectorField::zero(n), CovectorField::zero(n), eps,
                       metric_dotnabla(m));
}

ExtendedField suspension(const TimeDepVectorField& X) {
  return ExtendedField{ScalarField::constant(X.dim(), 1.0), X};
}

SplitVector extended_cov_deriv(const ExtendedConnection& ec, const ExtendedField& Xhat, const ExtendedField& Yhat,
                               const Event& e) {
  const std::size_t n = ec.dim();
  require_dim(n, Xhat.dim(), "extended X");
  require_dim(n, Yhat.dim(), "extended Y");
  require_dim(n, Xhat.f0.dim(), "extended X time component");
  require_dim(n, Yhat.f0.dim(), "extended Y time component");
  check_event(e, n);
  const double t = e.t;
  const Vec& x = e.x;

  const double f0 = Xhat.f0(t, x);
  const double g0 = Yhat.f0(t, x);
  const Vec X = Xhat.X(t, x);
  const Vec Y = Yhat.X(t, x);

  SplitVector r;
  r.horizontal = f0 * Yhat.f0.dt(t, x) + dot(X, Yhat.f0.grad_x(t, x)) + ec.lambda(t, x) * f0 * g0 +
                 dot(ec.alpha(t, x), X) * g0 + dot(ec.beta(t, x), Y) * f0 + bilinear(ec.eps(t, x), X, Y);
  r.vertical = f0 * Yhat.X.dt(t, x) + Yhat.X.jac_x(t, x) * X + ec.core.gamma(t, x).contract(X, Y) +
               (f0 * g0) * ec.core.C(t, x) + g0 * (ec.core.A(t, x) * X) + f0 * (ec.core.B(t, x) * Y);
  return r;
}

Vec dotnabla_apply(const DotNabla& dn, const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e) {
  const std::size_t n = dn.dim();
  require_dim(n, X.dim(), "X");
  require_dim(n, Y.dim(), "Y");
  check_event(e, n);
  const double t = e.t;
  const Vec& x = e.x;
  const Vec xv = X(t, x);
  const Vec yv = Y(t, x);
  return Y.dt(t, x) + Y.jac_x(t, x) * xv + dn.gamma(t, x).contract(xv, yv) + dn.C(t, x) + dn.A(t, x) * xv +
         dn.B(t, x) * yv;
}

}  // namespace tdg
