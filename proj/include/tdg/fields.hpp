#pragma once

// Differentiable fields over (t, x) ∈ ℝ × ℝⁿ.
//
// Fields are built either from closed-form pieces (value plus hand-written
// derivatives) or from a single generic evaluator that is instantiated for
// double, Dual1 and Dual2; derivatives are then exact forward-mode passes, one
// direction per pass.

#include <cstddef>
#include <functional>
#include <string>
#include <type_traits>
#include <utility>

#include "tdg/dual.hpp"
#include "tdg/errors.hpp"
#include "tdg/linalg.hpp"

namespace tdg {

struct Event {
  double t = 0.0;
  Vec x;

  std::size_t dim() const { return x.size(); }
};

struct TangentVector {
  Event base;
  Vec v;
};

// Throws ModelError unless the event has dimension n and finite components.
void check_event(const Event& e, std::size_t n);
void check_tangent(const TangentVector& tv, std::size_t n);

enum class Provenance { closed_form, autodiff };

const char* to_string(Provenance p);

template <class S>
using TimeFn = std::function<S(const S&)>;
template <class S>
using ScalarFn = std::function<S(const S&, const Vector<S>&)>;
template <class S>
using VectorFn = std::function<Vector<S>(const S&, const Vector<S>&)>;
template <class S>
using MatrixFn = std::function<Matrix<S>(const S&, const Vector<S>&)>;

// One generic evaluator type-erased at the three scalar levels used here:
// values (double), first derivatives (Dual1), mixed second derivatives (Dual2).
template <template <class> class Fn>
struct Lifted {
  Fn<double> d0;
  Fn<Dual1> d1;
  Fn<Dual2> d2;

  template <class G>
  static Lifted from(const G& g) {
    return Lifted{Fn<double>(g), Fn<Dual1>(g), Fn<Dual2>(g)};
  }

  template <class S>
  const Fn<S>& at() const {
    if constexpr (std::is_same_v<S, double>) {
      return d0;
    } else if constexpr (std::is_same_v<S, Dual1>) {
      return d1;
    } else {
      static_assert(std::is_same_v<S, Dual2>, "unsupported scalar level");
      return d2;
    }
  }

  explicit operator bool() const { return static_cast<bool>(d0); }
};

// x lifted one dual level with tangent e_k (k == npos gives a zero tangent).
template <class S>
Vector<Dual<S>> seed_direction(const Vector<S>& x, std::size_t k) {
  Vector<Dual<S>> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = make_dual(x[i], i == k ? 1.0 : 0.0);
  return r;
}

template <class S>
Vector<Dual<S>> seed_constant(const Vector<S>& x) {
  return seed_direction(x, static_cast<std::size_t>(-1));
}

// Scalar function of time only (mass schedules and the like).
class TimeFunction {
 public:
  TimeFunction() = default;

  template <class G>
  static TimeFunction from_generic(const G& g, std::string label = {}) {
    TimeFunction f;
    f.fn_ = Lifted<TimeFn>::from(g);
    f.label_ = std::move(label);
    return f;
  }
  static TimeFunction constant(double c);

  template <class S>
  S operator()(const S& t) const {
    return fn_.at<S>()(t);
  }
  double derivative(double t) const;
  const std::string& label() const { return label_; }

 private:
  Lifted<TimeFn> fn_;
  std::string label_;
};

class ScalarField {
 public:
  using Eval = std::function<double(double, const Vec&)>;
  using Gradient = std::function<Vec(double, const Vec&)>;

  ScalarField() = default;
  ScalarField(std::size_t dim, Eval eval, Gradient grad_x, Eval dt,
              Provenance provenance = Provenance::closed_form);

  template <class G>
  static ScalarField from_generic(std::size_t dim, const G& g);
  static ScalarField constant(std::size_t dim, double c);

  std::size_t dim() const { return dim_; }
  Provenance provenance() const { return provenance_; }

  double operator()(double t, const Vec& x) const;
  Vec grad_x(double t, const Vec& x) const;
  double dt(double t, const Vec& x) const;

 private:
  std::size_t dim_ = 0;
  Eval eval_;
  Gradient grad_;
  Eval dt_;
  Provenance provenance_ = Provenance::closed_form;
};

// Build a ScalarField whose derivatives are forward-mode passes of `f`.
// `f` must be callable as f(S t, const Vector<S>& x) -> S for S in
// {double, Dual1}.
template <class G>
ScalarField dual_lift(std::size_t dim, const G& f) {
  ScalarFn<double> f0(f);
  ScalarFn<Dual1> f1(f);
  auto grad = [f1, dim](double t, const Vec& x) {
    Vec g(dim);
    for (std::size_t k = 0; k < dim; ++k) g[k] = f1(make_dual(t), seed_direction(x, k)).der;
    return g;
  };
  auto dt = [f1](double t, const Vec& x) { return f1(make_dual(t, 1.0), seed_constant(x)).der; };
  return ScalarField(dim, std::move(f0), std::move(grad), std::move(dt), Provenance::autodiff);
}

template <class G>
ScalarField ScalarField::from_generic(std::size_t dim, const G& g) {
  return dual_lift(dim, g);
}

class TimeDepVectorField {
 public:
  using Eval = std::function<Vec(double, const Vec&)>;
  using Jacobian = std::function<Mat(double, const Vec&)>;

  TimeDepVectorField() = default;
  TimeDepVectorField(std::size_t dim, Eval eval, Jacobian jac_x, Eval dt,
                     Provenance provenance = Provenance::closed_form);

  // `g(S t, const Vector<S>& x) -> Vector<S>` for S in {double, Dual1}.
  template <class G>
  static TimeDepVectorField from_generic(std::size_t dim, const G& g);
  static TimeDepVectorField zero(std::size_t dim);
  static TimeDepVectorField constant(const Vec& c);

  std::size_t dim() const { return dim_; }
  Provenance provenance() const { return provenance_; }

  Vec operator()(double t, const Vec& x) const;
  // (∂Xⁱ/∂xʲ)
  Mat jac_x(double t, const Vec& x) const;
  // Ẋ
  Vec dt(double t, const Vec& x) const;

 private:
  std::size_t dim_ = 0;
  Eval eval_;
  Jacobian jac_;
  Eval dt_;
  Provenance provenance_ = Provenance::closed_form;
};

template <class G>
TimeDepVectorField TimeDepVectorField::from_generic(std::size_t dim, const G& g) {
  VectorFn<double> f0(g);
  VectorFn<Dual1> f1(g);
  auto jac = [f1, dim](double t, const Vec& x) {
    Mat j(dim, dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const Vector<Dual1> col = f1(make_dual(t), seed_direction(x, k));
      for (std::size_t i = 0; i < dim; ++i) j(i, k) = col[i].der;
    }
    return j;
  };
  auto dt = [f1, dim](double t, const Vec& x) {
    const Vector<Dual1> r = f1(make_dual(t, 1.0), seed_constant(x));
    Vec d(dim);
    for (std::size_t i = 0; i < dim; ++i) d[i] = r[i].der;
    return d;
  };
  return TimeDepVectorField(dim, std::move(f0), std::move(jac), std::move(dt), Provenance::autodiff);
}

// Pointwise algebra on fields, with the product rule applied to derivatives.
TimeDepVectorField operator+(const TimeDepVectorField& a, const TimeDepVectorField& b);
TimeDepVectorField operator-(const TimeDepVectorField& a, const TimeDepVectorField& b);
TimeDepVectorField operator*(const ScalarField& f, const TimeDepVectorField& y);
TimeDepVectorField operator*(double c, const TimeDepVectorField& y);

// (t, x) -> n×n matrix. Used for endomorphisms (A, B) and 2-covariant
// fields (ε); which one is meant is a matter of how it is contracted.
class MatrixField {
 public:
  using Eval = std::function<Mat(double, const Vec&)>;

  MatrixField() = default;
  MatrixField(std::size_t dim, Eval eval);

  static MatrixField constant(const Mat& m);
  static MatrixField zero(std::size_t dim);
  static MatrixField identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  Mat operator()(double t, const Vec& x) const;

 private:
  std::size_t dim_ = 0;
  Eval eval_;
};

using EndomorphismField = MatrixField;
using CovariantTwoField = MatrixField;

// Time-dependent 1-form, (t, x) -> row vector.
class CovectorField {
 public:
  using Eval = std::function<Vec(double, const Vec&)>;

  CovectorField() = default;
  CovectorField(std::size_t dim, Eval eval);

  static CovectorField zero(std::size_t dim);
  static CovectorField constant(const Vec& c);

  std::size_t dim() const { return dim_; }
  Vec operator()(double t, const Vec& x) const;

 private:
  std::size_t dim_ = 0;
  Eval eval_;
};

}  // namespace tdg
