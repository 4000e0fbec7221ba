#pragma once

// Time-dependent Riemannian metrics g_t in a single global chart.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "tdg/fields.hpp"

namespace tdg {

// g, ∂g/∂xᵏ (k = 0..n-1) and ġ at one point.
template <class S>
struct MetricJetT {
  Matrix<S> g;
  std::vector<Matrix<S>> dg_dx;
  Matrix<S> dg_dt;
};
using MetricJet = MetricJetT<double>;

class MetricField {
 public:
  using Eval = std::function<Mat(double, const Vec&)>;
  using PartialEval = std::function<Mat(double, const Vec&, std::size_t)>;

  MetricField() = default;

  // Generic evaluator g(S t, const Vector<S>& x) -> Matrix<S>, instantiated
  // for S in {double, Dual1, Dual2}. Samples a few deterministic points and
  // rejects evaluators whose asymmetry exceeds `asymmetry_tol`.
  template <class G>
  static MetricField from_generic(std::size_t dim, const G& g, std::string label = {},
                                  double asymmetry_tol = 1e-10) {
    return MetricField(dim, Lifted<MatrixFn>::from(g), std::move(label), asymmetry_tol);
  }

  // Hand-differentiated metric. No lifted evaluator, so Γ̇ of this metric
  // falls back to central differences in t.
  static MetricField closed_form(std::size_t dim, Eval g, PartialEval dg_dx, Eval dg_dt, std::string label = {});

  std::size_t dim() const { return dim_; }
  Provenance provenance() const { return provenance_; }
  const std::string& label() const { return label_; }
  // Largest |g - gᵀ| seen at construction-time sampling.
  double asymmetry_residual() const { return asymmetry_; }
  bool has_generic() const { return static_cast<bool>(generic_); }

  Mat g(double t, const Vec& x) const;
  Mat dg_dx(double t, const Vec& x, std::size_t k) const;
  Mat dg_dt(double t, const Vec& x) const;
  MetricJet jet(double t, const Vec& x) const;

  bool positive_definite(double t, const Vec& x) const;

  // Lifted access for S in {double, Dual1}: the jet is computed one dual
  // level above S. Requires has_generic().
  template <class S>
  MetricJetT<S> jet_at(const S& t, const Vector<S>& x) const;

 private:
  MetricField(std::size_t dim, Lifted<MatrixFn> generic, std::string label, double asymmetry_tol);

  std::size_t dim_ = 0;
  Lifted<MatrixFn> generic_;
  Eval g_;
  PartialEval dg_dx_;
  Eval dg_dt_;
  Provenance provenance_ = Provenance::closed_form;
  std::string label_;
  double asymmetry_ = 0.0;
};

template <class G>
MetricField metric_from_eval(std::size_t dim, const G& g_eval, std::string label = {}) {
  return MetricField::from_generic(dim, g_eval, std::move(label));
}

template <class S>
MetricJetT<S> MetricField::jet_at(const S& t, const Vector<S>& x) const {
  if (!generic_) throw ModelError("metric '" + label_ + "' has no lifted evaluator");
  const auto& f = generic_.at<Dual<S>>();
  const std::size_t n = dim_;
  auto der_of = [n](const Matrix<Dual<S>>& m) {
    Matrix<S> r(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r(i, j) = m(i, j).der;
    return symmetrized(r);
  };
  MetricJetT<S> out;
  const Matrix<Dual<S>> gt = f(make_dual(t, 1.0), seed_constant(x));
  Matrix<S> g0(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g0(i, j) = gt(i, j).val;
  out.g = symmetrized(g0);
  out.dg_dt = der_of(gt);
  out.dg_dx.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.dg_dx.push_back(der_of(f(make_dual(t), seed_direction(x, k))));
  return out;
}

// Inverse through a Cholesky factorization; throws NotPositiveDefinite.
template <class S>
Matrix<S> inverse_spd(const Matrix<S>& g, double t, const Vec& x) {
  const auto l = cholesky(g);
  if (!l) throw NotPositiveDefinite(t, x);
  return cholesky_inverse(*l);
}

Mat metric_inverse(const MetricField& m, const Event& e);

// G⁻¹·Ġ
Mat musical_endomorphism(const MetricField& m, const Event& e);

}  // namespace tdg
