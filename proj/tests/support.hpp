#pragma once

// Oracles shared by the unit tests and the acceptance runner. Everything here
// is written independently of the library internals: metrics are restated
// from their definitions, chart maps carry hand-written derivatives.

#include <cmath>
#include <functional>
#include <random>
#include <type_traits>

#include "tdg/dual.hpp"
#include "tdg/linalg.hpp"

namespace oracle {

using tdg::Mat;
using tdg::Matrix;
using tdg::Tensor;
using tdg::Vec;
using tdg::Vector;

inline constexpr double pi = 3.14159265358979323846;

template <class T>
using scalar_t = std::remove_cvref_t<T>;

// Double pendulum with the default schedules m₁ = 2 + sin t, m₂ = 1 + ½ cos t,
// unit lengths. G = [[ℓ₁²(m₁+m₂), ℓ₁ℓ₂m₂cosΔ], [ℓ₁ℓ₂m₂cosΔ, ℓ₂²m₂]].
struct Pendulum {
  template <class S>
  Matrix<S> operator()(const S& t, const Vector<S>& x) const {
    using std::cos, std::sin;
    const S m1 = 2.0 + sin(t);
    const S m2 = 1.0 + 0.5 * cos(t);
    const S c = cos(x[0] - x[1]);
    return Matrix<S>{{m1 + m2, m2 * c}, {m2 * c, m2}};
  }
};

struct Conformal {
  template <class S>
  Matrix<S> operator()(const S& t, const Vector<S>&) const {
    using std::exp;
    const S e = exp(2.0 * t);
    return Matrix<S>{{e, S(0.0)}, {S(0.0), e}};
  }
};

// diag(1 + (x¹)², e^{2t}): ġ = diag(0, 2e^{2t}) is degenerate, so v = e₁ is
// ġ-isotropic and stays so along the geodesic.
struct Isotropic {
  template <class S>
  Matrix<S> operator()(const S& t, const Vector<S>& x) const {
    using std::exp;
    return Matrix<S>{{1.0 + x[0] * x[0], S(0.0)}, {S(0.0), exp(2.0 * t)}};
  }
};

// Chart maps x = ψ(y) with Jacobian and Hessian written out by hand.
struct Chart {
  std::function<Vec(const Vec&)> psi;
  std::function<Mat(const Vec&)> jac;
  std::function<Tensor(const Vec&)> hess;  // hess(k, b, c) = ∂²ψᵏ/∂yᵇ∂yᶜ
};

// ψ(y) = (y¹ + 0.3 sin y², y² + 0.2 (y¹)²)
template <class S>
Vector<S> shear_psi(const Vector<S>& y) {
  using std::sin;
  return Vector<S>{y[0] + 0.3 * sin(y[1]), y[1] + 0.2 * y[0] * y[0]};
}
template <class S>
Matrix<S> shear_jac(const Vector<S>& y) {
  using std::cos;
  return Matrix<S>{{S(1.0), 0.3 * cos(y[1])}, {0.4 * y[0], S(1.0)}};
}

// ψ(y) = e^{y¹}(cos y², sin y²), log-polar coordinates
template <class S>
Vector<S> logpolar_psi(const Vector<S>& y) {
  using std::cos, std::exp, std::sin;
  const S r = exp(y[0]);
  return Vector<S>{r * cos(y[1]), r * sin(y[1])};
}
template <class S>
Matrix<S> logpolar_jac(const Vector<S>& y) {
  using std::cos, std::exp, std::sin;
  const S r = exp(y[0]);
  return Matrix<S>{{r * cos(y[1]), -r * sin(y[1])}, {r * sin(y[1]), r * cos(y[1])}};
}

inline Chart shear_chart() {
  return {[](const Vec& y) { return shear_psi(y); }, [](const Vec& y) { return shear_jac(y); },
          [](const Vec& y) {
            Tensor h(2);
            h(0, 1, 1) = -0.3 * std::sin(y[1]);
            h(1, 0, 0) = 0.4;
            return h;
          }};
}

inline Chart logpolar_chart() {
  return {[](const Vec& y) { return logpolar_psi(y); }, [](const Vec& y) { return logpolar_jac(y); },
          [](const Vec& y) {
            const double r = std::exp(y[0]), c = std::cos(y[1]), s = std::sin(y[1]);
            Tensor h(2);
            h(0, 0, 0) = r * c;
            h(0, 0, 1) = h(0, 1, 0) = -r * s;
            h(0, 1, 1) = -r * c;
            h(1, 0, 0) = r * s;
            h(1, 0, 1) = h(1, 1, 0) = r * c;
            h(1, 1, 1) = -r * s;
            return h;
          }};
}

// The metric g expressed in y-coordinates: Jᵀ g(t, ψ(y)) J.
template <class G, class Psi, class Jac>
auto pulled_back(G g, Psi psi, Jac jac) {
  return [g, psi, jac](const auto& t, const auto& y) {
    using S = scalar_t<decltype(t)>;
    const Vector<S> yy = y;
    const Matrix<S> J = jac(yy);
    return tdg::Matrix<S>(J.transpose() * g(t, psi(yy)) * J);
  };
}

// (2,1)-tensor law: T̃ᵃ_bc = (J⁻¹)ᵃ_k Tᵏ_ij Jⁱ_b Jʲ_c
inline Tensor tensor_law(const Tensor& T, const Mat& J) {
  const std::size_t n = J.rows();
  const Mat Ji = *tdg::inverse(J);
  Tensor out(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) s += Ji(a, k) * T(k, i, j) * J(i, b) * J(j, c);
        out(a, b, c) = s;
      }
  return out;
}

// (J⁻¹)ᵃ_k ∂²ψᵏ/∂yᵇ∂yᶜ, the inhomogeneous term of the connection law.
inline Tensor inhomogeneous_term(const Tensor& hess, const Mat& J) {
  const std::size_t n = J.rows();
  const Mat Ji = *tdg::inverse(J);
  Tensor out(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += Ji(a, k) * hess(k, b, c);
        out(a, b, c) = s;
      }
  return out;
}

inline double max_abs(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  const std::size_t n = a.dim();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(a(k, i, j) - b(k, i, j)));
  return m;
}

inline double max_abs(const Tensor& a) { return max_abs(a, Tensor(a.dim())); }

// Central difference of a vector-valued function of one variable.
template <class F>
auto central(F f, double s, double h) {
  return (f(s + h) - f(s - h)) / (2.0 * h);
}

// Matrix exponential by scaling and squaring with a Taylor core.
inline Mat expm(const Mat& A) {
  const std::size_t n = A.rows();
  int squarings = 0;
  double norm = tdg::max_abs(A);
  while (norm > 0.25) {
    norm /= 2.0;
    ++squarings;
  }
  const Mat B = (1.0 / std::pow(2.0, squarings)) * A;
  Mat term = Mat::identity(n), sum = Mat::identity(n);
  for (int k = 1; k <= 20; ++k) {
    term = (1.0 / k) * (term * B);
    sum = sum + term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

// Kinetic energy along a path, T(t) = ½ g(t, x)(v, v), and its exact time
// derivative from a Dual1 seeding of (t, x, v) in the direction (1, v, a).
template <class G>
std::pair<double, double> kinetic_and_rate(const G& g, double t, const Vec& x, const Vec& v, const Vec& a) {
  using tdg::Dual1;
  const std::size_t n = x.size();
  Vector<Dual1> xd(n), vd(n);
  for (std::size_t i = 0; i < n; ++i) {
    xd[i] = Dual1(x[i], v[i]);
    vd[i] = Dual1(v[i], a[i]);
  }
  const Matrix<Dual1> gm = g(Dual1(t, 1.0), xd);
  Dual1 T(0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) T += 0.5 * gm(i, j) * vd[i] * vd[j];
  return {T.val, T.der};
}

// ġ(v, v) straight from the oracle metric.
template <class G>
double gdot_vv(const G& g, double t, const Vec& x, const Vec& v) {
  using tdg::Dual1;
  const std::size_t n = x.size();
  Vector<Dual1> xd(n);
  for (std::size_t i = 0; i < n; ++i) xd[i] = Dual1(x[i]);
  const Matrix<Dual1> gm = g(Dual1(t, 1.0), xd);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += gm(i, j).der * v[i] * v[j];
  return s;
}

}  // namespace oracle
