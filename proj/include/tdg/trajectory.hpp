#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "tdg/linalg.hpp"

namespace tdg {

// Cubic Hermite interpolation on [t0, t1] from values and slopes.
Vec hermite(double t0, const Vec& y0, const Vec& d0, double t1, const Vec& y1, const Vec& d1, double t);
Vec hermite_slope(double t0, const Vec& y0, const Vec& d0, double t1, const Vec& y1, const Vec& d1, double t);

// A sampled path: strictly monotone times, positions, velocities and
// (optionally) accelerations. Immutable after construction.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<double> t, std::vector<Vec> x, std::vector<Vec> v,
             std::optional<std::vector<Vec>> a = std::nullopt);

  std::size_t size() const { return t_.size(); }
  std::size_t dim() const { return x_.empty() ? 0 : x_.front().size(); }
  bool increasing() const { return t_.size() < 2 || t_.back() > t_.front(); }
  bool has_acceleration() const { return a_.has_value(); }

  double t(std::size_t i) const { return t_[i]; }
  const Vec& x(std::size_t i) const { return x_[i]; }
  const Vec& v(std::size_t i) const { return v_[i]; }
  // Stored acceleration, or a three-point difference of v when absent.
  Vec a(std::size_t i) const;

  double t_front() const { return t_.front(); }
  double t_back() const { return t_.back(); }
  const Vec& x_back() const { return x_.back(); }
  const Vec& v_back() const { return v_.back(); }
  const std::vector<double>& times() const { return t_; }

  // Interpolated state; throws ModelError outside the sampled span.
  Vec position(double t) const;
  Vec velocity(double t) const;
  Vec acceleration(double t) const;

 private:
  std::size_t segment(double t) const;

  std::vector<double> t_;
  std::vector<Vec> x_;
  std::vector<Vec> v_;
  std::optional<std::vector<Vec>> a_;
};

// Vector field along a path, sampled with its derivative (e.g. a transported
// vector and its rate).
class SampledVector {
 public:
  SampledVector() = default;
  SampledVector(std::vector<double> t, std::vector<Vec> w, std::vector<Vec> dw);

  std::size_t size() const { return t_.size(); }
  double t(std::size_t i) const { return t_[i]; }
  const Vec& w(std::size_t i) const { return w_[i]; }
  const Vec& back() const { return w_.back(); }
  Vec operator()(double t) const;

 private:
  std::vector<double> t_;
  std::vector<Vec> w_;
  std::vector<Vec> dw_;
};

}  // namespace tdg
