#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

namespace httq {

/// t_k = k * step, k = 0..intervals.
struct UniformGrid {
  double step = 0.0;
  std::size_t intervals = 0;

  UniformGrid() = default;
  UniformGrid(double step_, std::size_t intervals_);
  /// Grid on [0, horizon] with spacing at most `max_step` that ends exactly on
  /// the horizon.
  static UniformGrid covering(double horizon, double max_step);

  double horizon() const { return step * static_cast<double>(intervals); }
  double time(std::size_t k) const { return step * static_cast<double>(k); }
  std::size_t size() const { return intervals + 1; }
  std::vector<double> times() const;
};

/// Right-continuous path with left limits, affine between breakpoints.
/// On [t_k, t_{k+1}) the path equals values[k] + slopes[k] (t - t_k); jumps
/// happen only at breakpoints. All slopes zero means a step path.
class CadlagPath {
 public:
  CadlagPath() = default;
  CadlagPath(std::vector<double> times, std::vector<double> values, std::vector<double> slopes, double horizon);

  static CadlagPath constant(double c, double horizon);
  /// a + b t
  static CadlagPath affine(double a, double b, double horizon);
  static CadlagPath step(std::vector<double> times, std::vector<double> values, double horizon);
  /// Continuous interpolation through the points; flat after the last one.
  static CadlagPath linear(const std::vector<double>& times, const std::vector<double>& values, double horizon);
  static CadlagPath on_grid(const UniformGrid& grid, const std::vector<double>& values);

  double horizon() const { return horizon_; }
  bool is_step() const;
  std::size_t segments() const { return times_.size(); }
  const std::vector<double>& breakpoints() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& slopes() const { return slopes_; }

  double operator()(double t) const;
  double left_limit(double t) const;
  double at_end() const { return left_limit(horizon_); }

  double sup(double a, double b) const;
  double inf(double a, double b) const;
  double sup_norm(double a, double b) const;
  double sup() const { return sup(0.0, horizon_); }
  double inf() const { return inf(0.0, horizon_); }
  double sup_norm() const { return sup_norm(0.0, horizon_); }
  double integral(double a, double b) const;

  /// t -> \int_0^t path; step paths only.
  CadlagPath integrated() const;
  /// fn applied pointwise. Exact for step paths; for sloped segments the
  /// result interpolates fn linearly between segment ends.
  CadlagPath compose(const std::function<double(double)>& fn) const;
  CadlagPath positive_part() const;
  CadlagPath negative_part() const;

  CadlagPath operator+(const CadlagPath& other) const;
  CadlagPath operator-(const CadlagPath& other) const;
  CadlagPath operator*(double c) const;
  CadlagPath operator+(double c) const;

  std::vector<double> sample(const std::vector<double>& ts) const;
  std::vector<double> sample(const UniformGrid& grid) const { return sample(grid.times()); }

  /// (time, value) rows at every breakpoint, or on a grid of the given step.
  void write_csv(std::ostream& os, double densify_step = 0.0) const;

 private:
  std::size_t segment_at(double t) const;
  double end_of(std::size_t k) const { return k + 1 < times_.size() ? times_[k + 1] : horizon_; }
  CadlagPath combine(const CadlagPath& other, double sign) const;
  CadlagPath split_at_zero() const;

  std::vector<double> times_{0.0};
  std::vector<double> values_{0.0};
  std::vector<double> slopes_{0.0};
  double horizon_ = 0.0;
};

/// Accumulates a step path from (time, value) updates in time order; later
/// updates at an identical time overwrite earlier ones.
class StepPathBuilder {
 public:
  explicit StepPathBuilder(double initial) : times_{0.0}, values_{initial} {}
  void set(double t, double v);
  CadlagPath finish(double horizon) const;

 private:
  std::vector<double> times_, values_;
};

}  // namespace httq
