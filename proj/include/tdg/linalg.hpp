#pragma once

// Small dense linear algebra over an arbitrary scalar (double or Dual<...>).
// Dimensions here are chart dimensions, i.e. a handful of entries, so storage
// is a plain row-major std::vector and nothing is vectorised.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tdg/dual.hpp"

namespace tdg {

template <class T>
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, const T& fill = T{}) : data_(n, fill) {}
  Vector(std::initializer_list<T> init) : data_(init) {}
  explicit Vector(std::vector<T> data) : data_(std::move(data)) {}

  static Vector zero(std::size_t n) { return Vector(n, T(0.0)); }
  static Vector unit(std::size_t n, std::size_t k) {
    Vector e = zero(n);
    e[k] = T(1.0);
    return e;
  }

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }
  const std::vector<T>& raw() const { return data_; }

  Vector& operator+=(const Vector& o) {
    assert(o.size() == size());
    for (std::size_t i = 0; i < size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    assert(o.size() == size());
    for (std::size_t i = 0; i < size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  template <class U>
  Vector& operator*=(const U& s) {
    for (auto& v : data_) v = v * s;
    return *this;
  }
  template <class U>
  Vector& operator/=(const U& s) {
    for (auto& v : data_) v = v / s;
    return *this;
  }

  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator-(Vector a) {
    for (auto& v : a.data_) v = -v;
    return a;
  }
  friend Vector operator*(Vector a, const T& s) { return a *= s; }
  friend Vector operator*(const T& s, Vector a) { return a *= s; }
  friend Vector operator/(Vector a, const T& s) { return a /= s; }
  template <Arithmetic U>
    requires(!std::is_same_v<T, U>)
  friend Vector operator*(Vector a, U s) { return a *= s; }
  template <Arithmetic U>
    requires(!std::is_same_v<T, U>)
  friend Vector operator*(U s, Vector a) { return a *= s; }

  friend bool operator==(const Vector& a, const Vector& b) { return a.data_ == b.data_; }

  friend std::ostream& operator<<(std::ostream& os, const Vector& v) {
    os << '(';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    return os << ')';
  }

 private:
  std::vector<T> data_;
};

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw std::invalid_argument("ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix zero(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, T(0.0)); }
  static Matrix zero(std::size_t n) { return zero(n, n); }
  static Matrix identity(std::size_t n) {
    Matrix m = zero(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }
  static Matrix diagonal(const Vector<T>& d) {
    Matrix m = zero(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vector<T> column(std::size_t j) const {
    Vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    assert(o.rows_ == rows_ && o.cols_ == cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    assert(o.rows_ == rows_ && o.cols_ == cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  template <class U>
  Matrix& operator*=(const U& s) {
    for (auto& v : data_) v = v * s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) {
    for (auto& v : a.data_) v = -v;
    return a;
  }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }
  template <Arithmetic U>
    requires(!std::is_same_v<T, U>)
  friend Matrix operator*(Matrix a, U s) { return a *= s; }
  template <Arithmetic U>
    requires(!std::is_same_v<T, U>)
  friend Matrix operator*(U s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.cols_ == b.rows_);
    Matrix c = zero(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k)
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
  }
  friend Vector<T> operator*(const Matrix& a, const Vector<T>& v) {
    assert(a.cols_ == v.size());
    Vector<T> r = Vector<T>::zero(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) r[i] += a(i, j) * v[j];
    return r;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    os << '[';
    for (std::size_t i = 0; i < m.rows_; ++i) {
      os << (i ? "; " : "");
      for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? ", " : "") << m(i, j);
    }
    return os << ']';
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// Rank-3 array indexed (k, i, j) with k the upper index: Γᵏ_ij.
template <class T>
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(std::size_t n, const T& fill = T(0.0)) : n_(n), data_(n * n * n, fill) {}

  std::size_t dim() const { return n_; }
  T& operator()(std::size_t k, std::size_t i, std::size_t j) { return data_[(k * n_ + i) * n_ + j]; }
  const T& operator()(std::size_t k, std::size_t i, std::size_t j) const {
    return data_[(k * n_ + i) * n_ + j];
  }

  // Γᵏ_ij vⁱ wʲ
  Vector<T> contract(const Vector<T>& v, const Vector<T>& w) const {
    assert(v.size() == n_ && w.size() == n_);
    Vector<T> r = Vector<T>::zero(n_);
    for (std::size_t k = 0; k < n_; ++k)
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) r[k] += (*this)(k, i, j) * v[i] * w[j];
    return r;
  }

  const std::vector<T>& raw() const { return data_; }
  std::vector<T>& raw() { return data_; }

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using Vec = Vector<double>;
using Mat = Matrix<double>;
using Tensor = Tensor3<double>;

template <class T>
T dot(const Vector<T>& a, const Vector<T>& b) {
  assert(a.size() == b.size());
  T s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// vᵀ M w
template <class T>
T bilinear(const Matrix<T>& m, const Vector<T>& v, const Vector<T>& w) {
  return dot(v, m * w);
}

inline double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

inline double norm_inf(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double norm_inf(const Mat& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) row += std::abs(a(i, j));
    m = std::max(m, row);
  }
  return m;
}

inline double max_abs(const Mat& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

inline double max_abs(const Tensor& a) {
  double m = 0.0;
  for (double x : a.raw()) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const Mat& a, const Mat& b) { return max_abs(a - b); }

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  assert(a.dim() == b.dim());
  double m = 0.0;
  for (std::size_t i = 0; i < a.raw().size(); ++i) m = std::max(m, std::abs(a.raw()[i] - b.raw()[i]));
  return m;
}

template <class T>
Matrix<T> symmetrized(const Matrix<T>& a) {
  Matrix<T> s = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

inline double asymmetry(const Mat& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

template <class T>
Vector<T> value_cast(const Vector<double>& v) {
  Vector<T> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = T(v[i]);
  return r;
}

template <class S>
Vec values_of(const Vector<S>& v) {
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = value_of(v[i]);
  return r;
}

// Lower-triangular Cholesky factor; empty when a pivot is not positive.
template <class T>
std::optional<Matrix<T>> cholesky(const Matrix<T>& a) {
  const std::size_t n = a.rows();
  Matrix<T> l = Matrix<T>::zero(n);
  for (std::size_t j = 0; j < n; ++j) {
    T d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    const double dv = value_of(d);
    if (!(dv > 0.0) || !std::isfinite(dv)) return std::nullopt;
    const T ljj = sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      T s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

// Solve L Lᵀ x = b given the Cholesky factor L.
template <class T>
Vector<T> cholesky_solve(const Matrix<T>& l, const Vector<T>& b) {
  const std::size_t n = l.rows();
  Vector<T> y = b;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
    y[i] = y[i] / l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n; ++k) y[ii] -= l(k, ii) * y[k];
    y[ii] = y[ii] / l(ii, ii);
  }
  return y;
}

template <class T>
Matrix<T> cholesky_inverse(const Matrix<T>& l) {
  const std::size_t n = l.rows();
  Matrix<T> inv = Matrix<T>::zero(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vector<T> col = cholesky_solve(l, Vector<T>::unit(n, j));
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return symmetrized(inv);
}

// General inverse by Gauss-Jordan with partial pivoting; empty if singular.
inline std::optional<Mat> inverse(const Mat& a) {
  const std::size_t n = a.rows();
  Mat m = a;
  Mat inv = Mat::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    if (std::abs(m(piv, c)) < 1e-300) return std::nullopt;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(c, j), m(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
    }
    const double d = m(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      m(c, j) /= d;
      inv(c, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m(r, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        m(r, j) -= f * m(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

}  // namespace tdg
