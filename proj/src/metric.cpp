#include "tdg/metric.hpp"

#include <cmath>

namespace tdg {

namespace {

void check_shape(const Mat& m, std::size_t n, double t, const Vec& x) {
  if (m.rows() != n || m.cols() != n) throw EvaluationError("metric has wrong shape", t, x);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(m(i, j))) throw EvaluationError("non-finite metric component", t, x);
}

void check_arg(std::size_t n, const Vec& x) {
  if (x.size() != n)
    throw ModelError("metric argument: expected dimension " + std::to_string(n) + ", got " +
                     std::to_string(x.size()));
}

// Deterministic sample points for the construction-time symmetry check.
// Radical-inverse (van der Corput) sequences in bases 2, 3, 5, ...
double radical_inverse(unsigned i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

}  // namespace

MetricField::MetricField(std::size_t dim, Lifted<MatrixFn> generic, std::string label, double asymmetry_tol)
    : dim_(dim), generic_(std::move(generic)), provenance_(Provenance::autodiff), label_(std::move(label)) {
  if (dim_ == 0) throw ModelError("metric dimension must be at least 1");
  const auto& f = generic_.d0;
  g_ = [f](double t, const Vec& x) { return f(t, x); };
  const std::size_t n = dim_;
  for (unsigned s = 1; s <= 8; ++s) {
    const double t = 0.1 + 1.9 * radical_inverse(s, 2);
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = -1.0 + 2.0 * radical_inverse(s, kPrimes[(i + 1) % 10]);
    Mat m;
    try {
      m = f(t, x);
    } catch (const std::exception&) {
      continue;  // outside the model's domain; not our concern here
    }
    if (m.rows() != n || m.cols() != n)
      throw ModelError("metric '" + label_ + "' returned a " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()) + " matrix, expected " + std::to_string(n));
    const double a = asymmetry(m);
    if (std::isfinite(a)) asymmetry_ = std::max(asymmetry_, a);
  }
  if (asymmetry_ > asymmetry_tol)
    throw ModelError("metric '" + label_ + "' is not symmetric (residual " + std::to_string(asymmetry_) + ")");
}

MetricField MetricField::closed_form(std::size_t dim, Eval g, PartialEval dg_dx, Eval dg_dt, std::string label) {
  if (dim == 0) throw ModelError("metric dimension must be at least 1");
  MetricField m;
  m.dim_ = dim;
  m.g_ = std::move(g);
  m.dg_dx_ = std::move(dg_dx);
  m.dg_dt_ = std::move(dg_dt);
  m.provenance_ = Provenance::closed_form;
  m.label_ = std::move(label);
  return m;
}

Mat MetricField::g(double t, const Vec& x) const {
  check_arg(dim_, x);
  Mat m = g_(t, x);
  check_shape(m, dim_, t, x);
  return symmetrized(m);
}

Mat MetricField::dg_dx(double t, const Vec& x, std::size_t k) const {
  check_arg(dim_, x);
  if (k >= dim_) throw ModelError("metric partial index out of range");
  Mat m;
  if (generic_) {
    const Matrix<Dual1> r = generic_.d1(make_dual(t), seed_direction(x, k));
    m = Mat(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m(i, j) = r(i, j).der;
  } else {
    m = dg_dx_(t, x, k);
  }
  check_shape(m, dim_, t, x);
  return symmetrized(m);
}

Mat MetricField::dg_dt(double t, const Vec& x) const {
  check_arg(dim_, x);
  Mat m;
  if (generic_) {
    const Matrix<Dual1> r = generic_.d1(make_dual(t, 1.0), seed_constant(x));
    m = Mat(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m(i, j) = r(i, j).der;
  } else {
    m = dg_dt_(t, x);
  }
  check_shape(m, dim_, t, x);
  return symmetrized(m);
}

MetricJet MetricField::jet(double t, const Vec& x) const {
  check_arg(dim_, x);
  if (generic_) {
    MetricJet j = jet_at<double>(t, x);
    check_shape(j.g, dim_, t, x);
    check_shape(j.dg_dt, dim_, t, x);
    for (const auto& d : j.dg_dx) check_shape(d, dim_, t, x);
    return j;
  }
  MetricJet j;
  j.g = g(t, x);
  j.dg_dt = dg_dt(t, x);
  for (std::size_t k = 0; k < dim_; ++k) j.dg_dx.push_back(dg_dx(t, x, k));
  return j;
}

bool MetricField::positive_definite(double t, const Vec& x) const {
  return cholesky(g(t, x)).has_value();
}

Mat metric_inverse(const MetricField& m, const Event& e) { return inverse_spd(m.g(e.t, e.x), e.t, e.x); }

Mat musical_endomorphism(const MetricField& m, const Event& e) {
  return metric_inverse(m, e) * m.dg_dt(e.t, e.x);
}

}  // namespace tdg
