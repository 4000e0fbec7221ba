#include "tdg/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tdg/errors.hpp"

namespace tdg {

Vec hermite(double t0, const Vec& y0, const Vec& d0, double t1, const Vec& y1, const Vec& d1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y0 + (h10 * h) * d0 + h01 * y1 + (h11 * h) * d1;
}

Vec hermite_slope(double t0, const Vec& y0, const Vec& d0, double t1, const Vec& y1, const Vec& d1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double g00 = (6 * s2 - 6 * s) / h;
  const double g10 = 3 * s2 - 4 * s + 1;
  const double g01 = (-6 * s2 + 6 * s) / h;
  const double g11 = 3 * s2 - 2 * s;
  return g00 * y0 + g10 * d0 + g01 * y1 + g11 * d1;
}

namespace {

void check_monotone(const std::vector<double>& t) {
  if (t.size() < 2) return;
  const bool up = t[1] > t[0];
  for (std::size_t i = 1; i < t.size(); ++i) {
    const bool ok = up ? t[i] > t[i - 1] : t[i] < t[i - 1];
    if (!ok) throw ModelError("trajectory times must be strictly monotone");
  }
}

std::size_t find_segment(const std::vector<double>& ts, double t) {
  const std::size_t n = ts.size();
  const bool up = ts.back() > ts.front();
  const double lo = up ? ts.front() : ts.back();
  const double hi = up ? ts.back() : ts.front();
  const double slack = 1e-12 * std::max(1.0, std::abs(hi - lo));
  if (t < lo - slack || t > hi + slack)
    throw ModelError("time " + std::to_string(t) + " outside sampled span [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "]");
  std::size_t i;
  if (up) {
    i = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
  } else {
    i = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t, std::greater<double>()) - ts.begin());
  }
  return std::clamp<std::size_t>(i, 1, n - 1) - 1;
}

}  // namespace

Trajectory::Trajectory(std::vector<double> t, std::vector<Vec> x, std::vector<Vec> v,
                       std::optional<std::vector<Vec>> a)
    : t_(std::move(t)), x_(std::move(x)), v_(std::move(v)), a_(std::move(a)) {
  if (t_.empty()) throw ModelError("trajectory needs at least one sample");
  if (x_.size() != t_.size() || v_.size() != t_.size() || (a_ && a_->size() != t_.size()))
    throw ModelError("trajectory sample arrays differ in length");
  const std::size_t n = x_.front().size();
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (x_[i].size() != n || v_[i].size() != n || (a_ && (*a_)[i].size() != n))
      throw ModelError("trajectory samples differ in dimension");
  }
  check_monotone(t_);
}

Vec Trajectory::a(std::size_t i) const {
  if (a_) return (*a_)[i];
  const std::size_t n = t_.size();
  if (n < 2) return Vec::zero(dim());
  if (n == 2) return (v_[1] - v_[0]) / (t_[1] - t_[0]);
  // Three-point formula on a possibly nonuniform stencil, one-sided at the ends.
  const std::size_t c = std::clamp<std::size_t>(i, 1, n - 2);
  const double tm = t_[c - 1], t0 = t_[c], tp = t_[c + 1];
  const double x = t_[i];
  const double wm = (2 * x - t0 - tp) / ((tm - t0) * (tm - tp));
  const double w0 = (2 * x - tm - tp) / ((t0 - tm) * (t0 - tp));
  const double wp = (2 * x - tm - t0) / ((tp - tm) * (tp - t0));
  return wm * v_[c - 1] + w0 * v_[c] + wp * v_[c + 1];
}

std::size_t Trajectory::segment(double t) const { return find_segment(t_, t); }

Vec Trajectory::position(double t) const {
  if (t_.size() == 1) {
    find_segment(t_, t);
    return x_.front();
  }
  const std::size_t i = segment(t);
  return hermite(t_[i], x_[i], v_[i], t_[i + 1], x_[i + 1], v_[i + 1], t);
}

Vec Trajectory::velocity(double t) const {
  if (t_.size() == 1) {
    find_segment(t_, t);
    return v_.front();
  }
  const std::size_t i = segment(t);
  if (a_) return hermite(t_[i], v_[i], (*a_)[i], t_[i + 1], v_[i + 1], (*a_)[i + 1], t);
  return hermite_slope(t_[i], x_[i], v_[i], t_[i + 1], x_[i + 1], v_[i + 1], t);
}

Vec Trajectory::acceleration(double t) const {
  if (t_.size() == 1) {
    find_segment(t_, t);
    return a(0);
  }
  const std::size_t i = segment(t);
  return hermite_slope(t_[i], v_[i], a(i), t_[i + 1], v_[i + 1], a(i + 1), t);
}

SampledVector::SampledVector(std::vector<double> t, std::vector<Vec> w, std::vector<Vec> dw)
    : t_(std::move(t)), w_(std::move(w)), dw_(std::move(dw)) {
  if (t_.empty() || w_.size() != t_.size() || dw_.size() != t_.size())
    throw ModelError("sampled vector arrays differ in length");
  check_monotone(t_);
}

Vec SampledVector::operator()(double t) const {
  if (t_.size() == 1) {
    find_segment(t_, t);
    return w_.front();
  }
  const std::size_t i = find_segment(t_, t);
  return hermite(t_[i], w_[i], dw_[i], t_[i + 1], w_[i + 1], dw_[i + 1], t);
}

}  // namespace tdg
