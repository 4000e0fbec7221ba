#pragma once

// One-parameter families of immersions j_t : M -> ℝᵐ (Euclidean ambient) and
// the time-dependent metrics they induce.

#include <cstddef>
#include <functional>
#include <string>

#include "tdg/fields.hpp"
#include "tdg/metric.hpp"

namespace tdg {

template <class S>
using EmbedFn = std::function<Vector<S>(const S&, const Vector<S>&)>;

class EmbeddingFamily {
 public:
  EmbeddingFamily() = default;

  // j(S t, const Vector<S>& p) -> Vector<S> of length ambient_dim, for S up to
  // Dual3 (the induced metric needs Jacobians two dual levels deep).
  template <class G>
  static EmbeddingFamily from_generic(std::size_t dim, std::size_t ambient_dim, const G& j, std::string label = {}) {
    EmbeddingFamily f;
    f.dim_ = dim;
    f.ambient_ = ambient_dim;
    f.label_ = std::move(label);
    f.j0_ = EmbedFn<double>(j);
    f.j1_ = EmbedFn<Dual1>(j);
    f.j2_ = EmbedFn<Dual2>(j);
    f.j3_ = EmbedFn<Dual3>(j);
    return f;
  }

  std::size_t dim() const { return dim_; }
  std::size_t ambient_dim() const { return ambient_; }
  const std::string& label() const { return label_; }

  Vec j(double t, const Vec& p) const;
  Mat dj_dp(double t, const Vec& p) const;  // m × n
  Vec dj_dt(double t, const Vec& p) const;

  // Full column rank of dj_dp, judged by a Cholesky factorization of
  // dj_dpᵀ dj_dp with a relative pivot floor.
  bool is_immersion(double t, const Vec& p) const;
  void require_immersion(double t, const Vec& p) const;

  // dj_dpᵀ dj_dp at scalar level S ∈ {double, Dual1, Dual2}.
  template <class S>
  Matrix<S> pullback_at(const S& t, const Vector<S>& p) const;

 private:
  template <class S>
  const EmbedFn<S>& at() const;

  std::size_t dim_ = 0;
  std::size_t ambient_ = 0;
  std::string label_;
  EmbedFn<double> j0_;
  EmbedFn<Dual1> j1_;
  EmbedFn<Dual2> j2_;
  EmbedFn<Dual3> j3_;
};

template <class S>
const EmbedFn<S>& EmbeddingFamily::at() const {
  if constexpr (std::is_same_v<S, double>) return j0_;
  else if constexpr (std::is_same_v<S, Dual1>) return j1_;
  else if constexpr (std::is_same_v<S, Dual2>) return j2_;
  else return j3_;
}

template <class S>
Matrix<S> EmbeddingFamily::pullback_at(const S& t, const Vector<S>& p) const {
  const auto& f = at<Dual<S>>();
  std::vector<Vector<S>> cols;
  cols.reserve(dim_);
  for (std::size_t k = 0; k < dim_; ++k) {
    const Vector<Dual<S>> r = f(make_dual(t), seed_direction(p, k));
    if (r.size() != ambient_) throw ModelError("embedding '" + label_ + "' returned wrong ambient dimension");
    Vector<S> c(ambient_);
    for (std::size_t a = 0; a < ambient_; ++a) c[a] = r[a].der;
    cols.push_back(std::move(c));
  }
  Matrix<S> g(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j) {
      const S s = dot(cols[i], cols[j]);
      g(i, j) = s;
      g(j, i) = s;
    }
  return g;
}

// g_t = j_t^* (Euclidean). Immersion is checked at the metric's
// construction-time sample points; see README for why it is not re-checked
// on every query.
MetricField induced_metric(const EmbeddingFamily& fam);

}  // namespace tdg
