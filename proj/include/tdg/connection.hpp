#pragma once

// Connection data built from (or independent of) a time-dependent metric:
// Christoffel symbols of ᵗ∇, their time derivative Γ̇, time-dependent
// covariant derivation operators ∇̇ = (∇, C, A, B) and connections on ℝ×M.

#include <cstddef>
#include <functional>

#include "tdg/fields.hpp"
#include "tdg/metric.hpp"

namespace tdg {

// (t, x) -> Tᵏ_ij with k upper. When an evaluator lifted to Dual1 is present,
// time derivatives are taken exactly.
class Rank3Field {
 public:
  using Eval = std::function<Tensor(double, const Vec&)>;
  using LiftedEval = std::function<Tensor3<Dual1>(const Dual1&, const Vector<Dual1>&)>;

  Rank3Field() = default;
  Rank3Field(std::size_t dim, Eval eval, LiftedEval lifted = {});

  static Rank3Field zero(std::size_t dim);
  static Rank3Field constant(const Tensor& t);

  std::size_t dim() const { return dim_; }
  Tensor operator()(double t, const Vec& x) const;
  bool has_lifted() const { return static_cast<bool>(lifted_); }
  Tensor3<Dual1> lifted(const Dual1& t, const Vector<Dual1>& x) const;

 private:
  std::size_t dim_ = 0;
  Eval eval_;
  LiftedEval lifted_;
};

using ChristoffelEval = Rank3Field;

// Γᵏ_ij = ½ gᵏˡ (∂_i g_jl + ∂_j g_il − ∂_l g_ij)
template <class S>
Tensor3<S> levi_civita_at(const MetricJetT<S>& jet, double t, const Vec& x) {
  const std::size_t n = jet.g.rows();
  const Matrix<S> ginv = inverse_spd(jet.g, t, x);
  // First-kind symbols Γ_lij.
  Tensor3<S> first(n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        first(l, i, j) = 0.5 * (jet.dg_dx[i](j, l) + jet.dg_dx[j](i, l) - jet.dg_dx[l](i, j));
  Tensor3<S> gamma(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        S s(0.0);
        for (std::size_t l = 0; l < n; ++l) s += ginv(k, l) * first(l, i, j);
        gamma(k, i, j) = s;
        gamma(k, j, i) = s;
      }
  return gamma;
}

ChristoffelEval levi_civita(const MetricField& m);

// Step used when Γ has no lifted evaluator: h = 1e-5·max(1, |t|).
double gamma_dot_step(double t);

// ∂Γ/∂t as a rank-3 field.
Rank3Field gamma_dot(const ChristoffelEval& gamma);

struct DotNabla {
  ChristoffelEval gamma;
  TimeDepVectorField C;
  EndomorphismField A;
  EndomorphismField B;

  std::size_t dim() const { return gamma.dim(); }
};

// Checks that all four pieces share the chart dimension.
DotNabla make_dotnabla(ChristoffelEval gamma, TimeDepVectorField C, EndomorphismField A, EndomorphismField B);

// Γ = Levi-Civita, C = 0, A = B = ½ G⁻¹Ġ.
DotNabla metric_dotnabla(const MetricField& m);

struct ExtendedConnection {
  ScalarField lambda;
  CovectorField alpha;
  CovectorField beta;
  CovariantTwoField eps;
  DotNabla core;

  std::size_t dim() const { return core.dim(); }

  // Γ̂ᵘ_νρ on ℝ×M, index 0 being time; dimension n+1.
  Tensor christoffel_hat(double t, const Vec& x) const;
};

ExtendedConnection make_extended(ScalarField lambda, CovectorField alpha, CovectorField beta, CovariantTwoField eps,
                                 DotNabla core);

// λ = α = β = 0, ε = −½ġ, core = metric_dotnabla(m).
ExtendedConnection suspension_connection(const MetricField& m);

// Vector field on ℝ×M written as f⁰ ∂/∂t + X.
struct ExtendedField {
  ScalarField f0;
  TimeDepVectorField X;

  std::size_t dim() const { return X.dim(); }
};

// X̃ = ∂/∂t + X
ExtendedField suspension(const TimeDepVectorField& X);

struct SplitVector {
  double horizontal = 0.0;
  Vec vertical;
};

SplitVector extended_cov_deriv(const ExtendedConnection& ec, const ExtendedField& Xhat, const ExtendedField& Yhat,
                               const Event& e);

// ∇̇_X Y = Ẏ + ∇_X Y + C + A(X) + B(Y)
Vec dotnabla_apply(const DotNabla& dn, const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e);

}  // namespace tdg
