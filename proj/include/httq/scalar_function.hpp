#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace httq {

/// Real function on [0, inf) with a cumulative integral. Used both for hazard
/// functions h and for limit patience functions f.
class ScalarFunction {
 public:
  enum class Kind { constant, linear, power, piecewise_linear, custom };

  static ScalarFunction constant(double c);
  /// x -> slope * x
  static ScalarFunction linear(double slope);
  /// x -> coef * x^exponent, exponent > -1
  static ScalarFunction power(double coef, double exponent);
  /// Linear interpolation through (xs, ys); xs[0] must be 0. Held at ys.back()
  /// beyond the last knot.
  static ScalarFunction piecewise_linear(std::vector<double> xs, std::vector<double> ys);
  /// Arbitrary callable. The integral is tabulated once by composite
  /// trapezoid with step `integration_step` on [0, table_range] and continued
  /// by the same rule past the end.
  static ScalarFunction custom(std::function<double(double)> fn, std::string name = "custom",
                               double table_range = 64.0, double integration_step = 1e-3);

  Kind kind() const { return kind_; }
  std::string describe() const;

  double operator()(double x) const;
  /// \int_0^x value(u) du
  double integral(double x) const;
  /// Smallest x >= 0 with integral(x) >= y; +inf if the integral stays below y.
  double inverse_integral(double y) const;
  /// Smallest x >= 0 with value(x) >= y for a nondecreasing function; +inf if
  /// never reached.
  double inverse_value(double y) const;

  /// Antiderivative as a new function (closed form when available).
  ScalarFunction antiderivative() const;

  const std::vector<double>& knots_x() const { return xs_; }
  const std::vector<double>& knots_y() const { return ys_; }
  double parameter(int i) const { return params_[i]; }

 private:
  ScalarFunction() = default;
  double table_integral(double x) const;

  Kind kind_ = Kind::constant;
  double params_[2] = {0.0, 0.0};
  std::vector<double> xs_, ys_;
  std::vector<double> cum_;  // integral at knots (piecewise) or table points (custom)
  std::shared_ptr<const std::function<double(double)>> fn_;
  std::string name_;
  double step_ = 0.0;
};

/// Shape checks on a probe grid [0, range] with spacing `spacing`.
struct ShapeReport {
  bool starts_at_zero = true;
  bool nondecreasing = true;
  bool nonnegative = true;
  double max_slope = 0.0;
  double first_bad_x = 0.0;
};
ShapeReport probe_shape(const ScalarFunction& fn, double range = 10.0, double spacing = 1e-2);

}  // namespace httq
