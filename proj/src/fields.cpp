#include "tdg/fields.hpp"

#include <cmath>
#include <string>
#include <type_traits>

namespace tdg {

namespace {

bool all_finite(const Vec& v) {
  for (double c : v)
    if (!std::isfinite(c)) return false;
  return true;
}

bool all_finite(const Mat& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j))) return false;
  return true;
}

void check_dim(std::size_t expected, const Vec& x, const char* what) {
  if (x.size() != expected)
    throw ModelError(std::string(what) + ": expected dimension " + std::to_string(expected) + ", got " +
                     std::to_string(x.size()));
}

double finite_or_throw(double v, double t, const Vec& x, const char* what) {
  if (!std::isfinite(v)) throw EvaluationError(std::string("non-finite ") + what, t, x);
  return v;
}

Vec finite_or_throw(Vec v, std::size_t n, double t, const Vec& x, const char* what) {
  if (v.size() != n) throw EvaluationError(std::string(what) + " has wrong dimension", t, x);
  if (!all_finite(v)) throw EvaluationError(std::string("non-finite ") + what, t, x);
  return v;
}

Mat finite_or_throw(Mat m, std::size_t n, double t, const Vec& x, const char* what) {
  if (m.rows() != n || m.cols() != n) throw EvaluationError(std::string(what) + " has wrong shape", t, x);
  if (!all_finite(m)) throw EvaluationError(std::string("non-finite ") + what, t, x);
  return m;
}

}  // namespace

void check_event(const Event& e, std::size_t n) {
  check_dim(n, e.x, "event");
  if (!std::isfinite(e.t) || !all_finite(e.x)) throw ModelError("event has non-finite components");
}

void check_tangent(const TangentVector& tv, std::size_t n) {
  check_event(tv.base, n);
  check_dim(n, tv.v, "tangent vector");
  if (!all_finite(tv.v)) throw ModelError("tangent vector has non-finite components");
}

const char* to_string(Provenance p) {
  return p == Provenance::closed_form ? "closed_form" : "autodiff_from_eval";
}

TimeFunction TimeFunction::constant(double c) {
  return from_generic([c](const auto& t) { return std::remove_cvref_t<decltype(t)>(c); }, std::to_string(c));
}

double TimeFunction::derivative(double t) const { return fn_.d1(make_dual(t, 1.0)).der; }

// ScalarField

ScalarField::ScalarField(std::size_t dim, Eval eval, Gradient grad_x, Eval dt, Provenance provenance)
    : dim_(dim), eval_(std::move(eval)), grad_(std::move(grad_x)), dt_(std::move(dt)), provenance_(provenance) {}

ScalarField ScalarField::constant(std::size_t dim, double c) {
  return ScalarField(
      dim, [c](double, const Vec&) { return c; }, [dim](double, const Vec&) { return Vec::zero(dim); },
      [](double, const Vec&) { return 0.0; });
}

double ScalarField::operator()(double t, const Vec& x) const {
  check_dim(dim_, x, "scalar field argument");
  return finite_or_throw(eval_(t, x), t, x, "scalar field value");
}

Vec ScalarField::grad_x(double t, const Vec& x) const {
  check_dim(dim_, x, "scalar field argument");
  return finite_or_throw(grad_(t, x), dim_, t, x, "scalar field gradient");
}

double ScalarField::dt(double t, const Vec& x) const {
  check_dim(dim_, x, "scalar field argument");
  return finite_or_throw(dt_(t, x), t, x, "scalar field time derivative");
}

// TimeDepVectorField

TimeDepVectorField::TimeDepVectorField(std::size_t dim, Eval eval, Jacobian jac_x, Eval dt, Provenance provenance)
    : dim_(dim), eval_(std::move(eval)), jac_(std::move(jac_x)), dt_(std::move(dt)), provenance_(provenance) {}

TimeDepVectorField TimeDepVectorField::zero(std::size_t dim) { return constant(Vec::zero(dim)); }

TimeDepVectorField TimeDepVectorField::constant(const Vec& c) {
  const std::size_t n = c.size();
  return TimeDepVectorField(
      n, [c](double, const Vec&) { return c; }, [n](double, const Vec&) { return Mat::zero(n); },
      [n](double, const Vec&) { return Vec::zero(n); });
}

Vec TimeDepVectorField::operator()(double t, const Vec& x) const {
  check_dim(dim_, x, "vector field argument");
  return finite_or_throw(eval_(t, x), dim_, t, x, "vector field value");
}

Mat TimeDepVectorField::jac_x(double t, const Vec& x) const {
  check_dim(dim_, x, "vector field argument");
  return finite_or_throw(jac_(t, x), dim_, t, x, "vector field Jacobian");
}

Vec TimeDepVectorField::dt(double t, const Vec& x) const {
  check_dim(dim_, x, "vector field argument");
  return finite_or_throw(dt_(t, x), dim_, t, x, "vector field time derivative");
}

namespace {

void same_dim(std::size_t a, std::size_t b) {
  if (a != b) throw ModelError("field dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

// Outer product u vᵀ.
Mat outer(const Vec& u, const Vec& v) {
  Mat m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
  return m;
}

}  // namespace

TimeDepVectorField operator+(const TimeDepVectorField& a, const TimeDepVectorField& b) {
  same_dim(a.dim(), b.dim());
  return TimeDepVectorField(
      a.dim(), [a, b](double t, const Vec& x) { return a(t, x) + b(t, x); },
      [a, b](double t, const Vec& x) { return a.jac_x(t, x) + b.jac_x(t, x); },
      [a, b](double t, const Vec& x) { return a.dt(t, x) + b.dt(t, x); });
}

TimeDepVectorField operator-(const TimeDepVectorField& a, const TimeDepVectorField& b) {
  return a + (-1.0) * b;
}

TimeDepVectorField operator*(const ScalarField& f, const TimeDepVectorField& y) {
  same_dim(f.dim(), y.dim());
  return TimeDepVectorField(
      y.dim(), [f, y](double t, const Vec& x) { return f(t, x) * y(t, x); },
      [f, y](double t, const Vec& x) { return f(t, x) * y.jac_x(t, x) + outer(y(t, x), f.grad_x(t, x)); },
      [f, y](double t, const Vec& x) { return f(t, x) * y.dt(t, x) + f.dt(t, x) * y(t, x); });
}

TimeDepVectorField operator*(double c, const TimeDepVectorField& y) {
  return TimeDepVectorField(
      y.dim(), [c, y](double t, const Vec& x) { return c * y(t, x); },
      [c, y](double t, const Vec& x) { return c * y.jac_x(t, x); },
      [c, y](double t, const Vec& x) { return c * y.dt(t, x); });
}

// MatrixField

MatrixField::MatrixField(std::size_t dim, Eval eval) : dim_(dim), eval_(std::move(eval)) {}

MatrixField MatrixField::constant(const Mat& m) {
  if (!m.square()) throw ModelError("matrix field must be square");
  return MatrixField(m.rows(), [m](double, const Vec&) { return m; });
}

MatrixField MatrixField::zero(std::size_t dim) { return constant(Mat::zero(dim)); }
MatrixField MatrixField::identity(std::size_t dim) { return constant(Mat::identity(dim)); }

Mat MatrixField::operator()(double t, const Vec& x) const {
  check_dim(dim_, x, "matrix field argument");
  return finite_or_throw(eval_(t, x), dim_, t, x, "matrix field value");
}

// CovectorField

CovectorField::CovectorField(std::size_t dim, Eval eval) : dim_(dim), eval_(std::move(eval)) {}

CovectorField CovectorField::zero(std::size_t dim) { return constant(Vec::zero(dim)); }

CovectorField CovectorField::constant(const Vec& c) {
  return CovectorField(c.size(), [c](double, const Vec&) { return c; });
}

Vec CovectorField::operator()(double t, const Vec& x) const {
  check_dim(dim_, x, "covector field argument");
  return finite_or_throw(eval_(t, x), dim_, t, x, "covector field value");
}

}  // namespace tdg
