#pragma once

// Forward-mode dual numbers.
//
// A Dual<T> carries a value and one directional derivative. Nesting
// (Dual<Dual<double>>) gives mixed second derivatives: seed the outer level
// along one direction and the inner level along another.

#include <cmath>
#include <concepts>
#include <ostream>
#include <type_traits>

namespace tdg {

template <class T>
struct Dual;

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};
template <class T>
inline constexpr bool is_dual_v = is_dual<T>::value;

template <class U>
concept Arithmetic = std::is_arithmetic_v<U>;

template <class T>
struct Dual {
  T val{};
  T der{};

  constexpr Dual() = default;
  constexpr Dual(T v, T d = T{}) : val(v), der(d) {}
  template <Arithmetic U>
    requires(!std::is_same_v<T, double> || !std::is_same_v<U, double>)
  constexpr Dual(U v) : val(static_cast<double>(v)), der{} {}

  constexpr Dual& operator+=(const Dual& o) {
    val += o.val;
    der += o.der;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    val -= o.val;
    der -= o.der;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    der = der * o.val + val * o.der;
    val *= o.val;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    const T q = val / o.val;
    der = (der - q * o.der) / o.val;
    val = q;
    return *this;
  }

  friend constexpr Dual operator-(const Dual& a) { return {-a.val, -a.der}; }
  friend constexpr Dual operator+(const Dual& a) { return a; }

  friend constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend constexpr Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend constexpr Dual operator/(Dual a, const Dual& b) { return a /= b; }

  // Mixed with the inner scalar type.
  friend constexpr Dual operator+(const Dual& a, const T& b) { return {a.val + b, a.der}; }
  friend constexpr Dual operator+(const T& a, const Dual& b) { return {a + b.val, b.der}; }
  friend constexpr Dual operator-(const Dual& a, const T& b) { return {a.val - b, a.der}; }
  friend constexpr Dual operator-(const T& a, const Dual& b) { return {a - b.val, -b.der}; }
  friend constexpr Dual operator*(const Dual& a, const T& b) { return {a.val * b, a.der * b}; }
  friend constexpr Dual operator*(const T& a, const Dual& b) { return {a * b.val, a * b.der}; }
  friend constexpr Dual operator/(const Dual& a, const T& b) { return {a.val / b, a.der / b}; }
  friend constexpr Dual operator/(const T& a, const Dual& b) {
    const T q = a / b.val;
    return {q, -q * b.der / b.val};
  }

  // Mixed with plain arithmetic literals (only distinct from T when nested).
  template <Arithmetic U>
    requires(!std::is_same_v<T, U>)
  friend constexpr Dual operator+(const Dual& a, U b) { return a + T(b); }
  template <Arithmetic U>
    requires(!std::is_same_v<T, U>)
  friend constexpr Dual operator+(U a, const Dual& b) { return T(a) + b; }
  template <Arithmetic U>
    requires(!std::is_same_v<T, U>)
  friend constexpr Dual operator-(const Dual& a, U b) { return a - T(b); }
  template <Arithmetic U>
    requires(!std::is_same_v<T, U>)
  friend constexpr Dual operator-(U a, const Dual& b) { return T(a) - b; }
  template <Arithmetic U>
    requires(!std::is_same_v<T, U>)
  friend constexpr Dual operator*(const Dual& a, U b) { return a * T(b); }
  template <Arithmetic U>
    requires(!std::is_same_v<T, U>)
  friend constexpr Dual operator*(U a, const Dual& b) { return T(a) * b; }
  template <Arithmetic U>
    requires(!std::is_same_v<T, U>)
  friend constexpr Dual operator/(const Dual& a, U b) { return a / T(b); }
  template <Arithmetic U>
    requires(!std::is_same_v<T, U>)
  friend constexpr Dual operator/(U a, const Dual& b) { return T(a) / b; }

  // Ordering looks at the value only.
  friend constexpr bool operator<(const Dual& a, const Dual& b) { return a.val < b.val; }
  friend constexpr bool operator>(const Dual& a, const Dual& b) { return a.val > b.val; }
  friend constexpr bool operator<=(const Dual& a, const Dual& b) { return a.val <= b.val; }
  friend constexpr bool operator>=(const Dual& a, const Dual& b) { return a.val >= b.val; }
  friend constexpr bool operator==(const Dual& a, const Dual& b) { return a.val == b.val && a.der == b.der; }

  friend std::ostream& operator<<(std::ostream& os, const Dual& d) {
    return os << '(' << d.val << " + " << d.der << "e)";
  }
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual1>;
using Dual3 = Dual<Dual2>;

// Plain value of a possibly nested dual.
template <class S>
constexpr double value_of(const S& s) {
  if constexpr (is_dual_v<S>) {
    return value_of(s.val);
  } else {
    return static_cast<double>(s);
  }
}

// Floating-point overloads so generic model code can call sin(x) unqualified
// inside namespace tdg regardless of the scalar type.
template <std::floating_point F>
F sin(F x) { return std::sin(x); }
template <std::floating_point F>
F cos(F x) { return std::cos(x); }
template <std::floating_point F>
F tan(F x) { return std::tan(x); }
template <std::floating_point F>
F exp(F x) { return std::exp(x); }
template <std::floating_point F>
F log(F x) { return std::log(x); }
template <std::floating_point F>
F sqrt(F x) { return std::sqrt(x); }
template <std::floating_point F>
F abs(F x) { return std::abs(x); }
template <std::floating_point F>
F sinh(F x) { return std::sinh(x); }
template <std::floating_point F>
F cosh(F x) { return std::cosh(x); }
template <std::floating_point F>
F tanh(F x) { return std::tanh(x); }
template <std::floating_point F>
F atan(F x) { return std::atan(x); }
template <std::floating_point F>
F pow(F x, double p) { return std::pow(x, p); }
template <std::floating_point F>
bool isfinite(F x) { return std::isfinite(x); }

template <class T>
Dual<T> sin(const Dual<T>& a) { return {sin(a.val), cos(a.val) * a.der}; }
template <class T>
Dual<T> cos(const Dual<T>& a) { return {cos(a.val), -sin(a.val) * a.der}; }
template <class T>
Dual<T> tan(const Dual<T>& a) {
  const T c = cos(a.val);
  return {tan(a.val), a.der / (c * c)};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  const T e = exp(a.val);
  return {e, e * a.der};
}
template <class T>
Dual<T> log(const Dual<T>& a) { return {log(a.val), a.der / a.val}; }
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  const T r = sqrt(a.val);
  return {r, a.der / (2.0 * r)};
}
template <class T>
Dual<T> abs(const Dual<T>& a) { return value_of(a.val) < 0.0 ? -a : a; }
template <class T>
Dual<T> sinh(const Dual<T>& a) { return {sinh(a.val), cosh(a.val) * a.der}; }
template <class T>
Dual<T> cosh(const Dual<T>& a) { return {cosh(a.val), sinh(a.val) * a.der}; }
template <class T>
Dual<T> tanh(const Dual<T>& a) {
  const T th = tanh(a.val);
  return {th, (1.0 - th * th) * a.der};
}
template <class T>
Dual<T> atan(const Dual<T>& a) { return {atan(a.val), a.der / (1.0 + a.val * a.val)}; }
template <class T>
Dual<T> pow(const Dual<T>& a, double p) {
  return {pow(a.val, p), p * pow(a.val, p - 1.0) * a.der};
}
template <class T>
bool isfinite(const Dual<T>& a) { return isfinite(a.val) && isfinite(a.der); }

// Lift a value to the next dual level with a given tangent.
template <class S>
constexpr Dual<S> make_dual(const S& v, double d = 0.0) {
  return Dual<S>{v, S(d)};
}

}  // namespace tdg
