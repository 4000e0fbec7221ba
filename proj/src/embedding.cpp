#include "tdg/embedding.hpp"

#include <cmath>

namespace tdg {

namespace {

void check_arg(const EmbeddingFamily& f, const Vec& p) {
  if (p.size() != f.dim()) throw ModelError("embedding argument has wrong dimension");
}

}  // namespace

Vec EmbeddingFamily::j(double t, const Vec& p) const {
  check_arg(*this, p);
  Vec r = j0_(t, p);
  if (r.size() != ambient_) throw ModelError("embedding '" + label_ + "' returned wrong ambient dimension");
  for (double v : r)
    if (!std::isfinite(v)) throw EvaluationError("non-finite embedding value", t, p);
  return r;
}

Mat EmbeddingFamily::dj_dp(double t, const Vec& p) const {
  check_arg(*this, p);
  Mat m(ambient_, dim_);
  for (std::size_t k = 0; k < dim_; ++k) {
    const Vector<Dual1> r = j1_(make_dual(t), seed_direction(p, k));
    for (std::size_t a = 0; a < ambient_; ++a) m(a, k) = r[a].der;
  }
  return m;
}

Vec EmbeddingFamily::dj_dt(double t, const Vec& p) const {
  check_arg(*this, p);
  const Vector<Dual1> r = j1_(make_dual(t, 1.0), seed_constant(p));
  Vec d(ambient_);
  for (std::size_t a = 0; a < ambient_; ++a) d[a] = r[a].der;
  return d;
}

bool EmbeddingFamily::is_immersion(double t, const Vec& p) const {
  const Mat g = pullback_at<double>(t, p);
  double scale = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) scale = std::max(scale, std::abs(g(i, i)));
  if (!(scale > 0.0)) return false;
  const auto l = cholesky(g);
  if (!l) return false;
  for (std::size_t i = 0; i < dim_; ++i)
    if ((*l)(i, i) * (*l)(i, i) < 1e-12 * scale) return false;
  return true;
}

void EmbeddingFamily::require_immersion(double t, const Vec& p) const {
  if (!is_immersion(t, p)) throw NotAnImmersion(t, p);
}

MetricField induced_metric(const EmbeddingFamily& fam) {
  const std::size_t n = fam.dim();
  // Deterministic sample points with t in [0.1, 1.76].
  for (unsigned s = 1; s <= 8; ++s) {
    const double t = 0.1 + 0.2375 * (s - 1);
    Vec p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = -1.0 + 2.0 * std::fmod(0.618034 * (s + i), 1.0);
    fam.require_immersion(t, p);
  }
  return MetricField::from_generic(
      n, [fam](const auto& t, const auto& p) { return fam.pullback_at(t, p); }, "induced:" + fam.label());
}

}  // namespace tdg
