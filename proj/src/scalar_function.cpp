#include "httq/scalar_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace httq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double bisect_increasing(const F& fn, double target) {
  if (fn(0.0) >= target) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (fn(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) return kInf;
  }
  while (hi - lo > 1e-13 * (1.0 + hi)) {
    const double mid = 0.5 * (lo + hi);
    if (fn(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace

ScalarFunction ScalarFunction::constant(double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("constant function needs a finite value");
  ScalarFunction s;
  s.kind_ = Kind::constant;
  s.params_[0] = c;
  return s;
}

ScalarFunction ScalarFunction::linear(double slope) {
  if (!std::isfinite(slope)) throw std::invalid_argument("linear function needs a finite slope");
  ScalarFunction s;
  s.kind_ = Kind::linear;
  s.params_[0] = slope;
  return s;
}

ScalarFunction ScalarFunction::power(double coef, double exponent) {
  if (!std::isfinite(coef) || !std::isfinite(exponent) || exponent <= -1.0)
    throw std::invalid_argument("power function needs finite coef and exponent > -1");
  ScalarFunction s;
  s.kind_ = Kind::power;
  s.params_[0] = coef;
  s.params_[1] = exponent;
  return s;
}

ScalarFunction ScalarFunction::piecewise_linear(std::vector<double> xs, std::vector<double> ys) {
  if (xs.empty() || xs.size() != ys.size()) throw std::invalid_argument("piecewise_linear needs matching knots");
  if (xs.front() != 0.0) throw std::invalid_argument("piecewise_linear knots must start at 0");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("piecewise_linear knots must be strictly increasing");
  for (double y : ys)
    if (!std::isfinite(y)) throw std::invalid_argument("piecewise_linear values must be finite");
  ScalarFunction s;
  s.kind_ = Kind::piecewise_linear;
  s.cum_.assign(xs.size(), 0.0);
  for (std::size_t i = 1; i < xs.size(); ++i)
    s.cum_[i] = s.cum_[i - 1] + 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
  s.xs_ = std::move(xs);
  s.ys_ = std::move(ys);
  return s;
}

ScalarFunction ScalarFunction::custom(std::function<double(double)> fn, std::string name, double table_range,
                                      double integration_step) {
  if (!fn) throw std::invalid_argument("custom function is empty");
  if (!(table_range > 0.0) || !(integration_step > 0.0)) throw std::invalid_argument("bad custom table");
  ScalarFunction s;
  s.kind_ = Kind::custom;
  s.fn_ = std::make_shared<const std::function<double(double)>>(std::move(fn));
  s.name_ = std::move(name);
  s.step_ = integration_step;
  const auto m = static_cast<std::size_t>(std::ceil(table_range / integration_step));
  s.cum_.assign(m + 1, 0.0);
  double prev = (*s.fn_)(0.0);
  for (std::size_t k = 1; k <= m; ++k) {
    const double cur = (*s.fn_)(k * integration_step);
    s.cum_[k] = s.cum_[k - 1] + 0.5 * (prev + cur) * integration_step;
    prev = cur;
  }
  return s;
}

std::string ScalarFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::constant: os << "constant(" << params_[0] << ")"; break;
    case Kind::linear: os << "linear(" << params_[0] << ")"; break;
    case Kind::power: os << "power(" << params_[0] << "," << params_[1] << ")"; break;
    case Kind::piecewise_linear:
      os << "piecewise_linear(";
      for (std::size_t i = 0; i < xs_.size(); ++i) os << (i ? ";" : "") << xs_[i] << ":" << ys_[i];
      os << ")";
      break;
    case Kind::custom: os << name_; break;
  }
  return os.str();
}

double ScalarFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::constant: return params_[0];
    case Kind::linear: return params_[0] * x;
    case Kind::power: return x <= 0.0 ? (params_[1] == 0.0 ? params_[0] : 0.0) : params_[0] * std::pow(x, params_[1]);
    case Kind::piecewise_linear: {
      if (x <= 0.0) return ys_.front();
      if (x >= xs_.back()) return ys_.back();
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
      const double w = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
      return ys_[i] + w * (ys_[i + 1] - ys_[i]);
    }
    case Kind::custom: return (*fn_)(x);
  }
  return 0.0;
}

double ScalarFunction::table_integral(double x) const {
  const std::size_t m = cum_.size() - 1;
  const double end = m * step_;
  if (x >= end) {
    // continue the trapezoid rule past the cached range
    double acc = cum_[m];
    double t = end;
    double prev = (*fn_)(t);
    while (t + step_ < x) {
      const double cur = (*fn_)(t + step_);
      acc += 0.5 * (prev + cur) * step_;
      prev = cur;
      t += step_;
    }
    return acc + 0.5 * (prev + (*fn_)(x)) * (x - t);
  }
  const auto k = static_cast<std::size_t>(x / step_);
  const double t0 = k * step_;
  return cum_[k] + 0.5 * ((*fn_)(t0) + (*fn_)(x)) * (x - t0);
}

double ScalarFunction::integral(double x) const {
  if (x <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::constant: return params_[0] * x;
    case Kind::linear: return 0.5 * params_[0] * x * x;
    case Kind::power: return params_[0] * std::pow(x, params_[1] + 1.0) / (params_[1] + 1.0);
    case Kind::piecewise_linear: {
      if (x >= xs_.back()) return cum_.back() + ys_.back() * (x - xs_.back());
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
      return cum_[i] + 0.5 * (ys_[i] + (*this)(x)) * (x - xs_[i]);
    }
    case Kind::custom: return table_integral(x);
  }
  return 0.0;
}

double ScalarFunction::inverse_integral(double y) const {
  if (y <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::constant: return params_[0] > 0.0 ? y / params_[0] : kInf;
    case Kind::linear: return params_[0] > 0.0 ? std::sqrt(2.0 * y / params_[0]) : kInf;
    case Kind::power:
      return params_[0] > 0.0 ? std::pow((params_[1] + 1.0) * y / params_[0], 1.0 / (params_[1] + 1.0)) : kInf;
    default: return bisect_increasing([this](double x) { return integral(x); }, y);
  }
}

double ScalarFunction::inverse_value(double y) const {
  if (kind_ == Kind::linear && params_[0] > 0.0) return std::max(0.0, y / params_[0]);
  return bisect_increasing(*this, y);
}

ScalarFunction ScalarFunction::antiderivative() const {
  switch (kind_) {
    case Kind::constant: return linear(params_[0]);
    case Kind::linear: return power(0.5 * params_[0], 2.0);
    case Kind::power: return power(params_[0] / (params_[1] + 1.0), params_[1] + 1.0);
    default: {
      auto self = std::make_shared<const ScalarFunction>(*this);
      return custom([self](double x) { return self->integral(x); }, "integral_of_" + describe());
    }
  }
}

ShapeReport probe_shape(const ScalarFunction& fn, double range, double spacing) {
  ShapeReport r;
  const double f0 = fn(0.0);
  if (f0 != 0.0) {
    r.starts_at_zero = false;
    r.first_bad_x = 0.0;
  }
  double prev = f0;
  const auto m = static_cast<std::size_t>(std::ceil(range / spacing));
  for (std::size_t k = 0; k <= m; ++k) {
    const double x = k * spacing;
    const double v = fn(x);
    if (!std::isfinite(v) || v < 0.0) {
      if (r.nonnegative) r.first_bad_x = x;
      r.nonnegative = false;
    }
    if (k > 0) {
      if (v < prev) {
        if (r.nondecreasing && r.starts_at_zero) r.first_bad_x = x;
        r.nondecreasing = false;
      }
      r.max_slope = std::max(r.max_slope, std::abs(v - prev) / spacing);
    }
    prev = v;
  }
  return r;
}

}  // namespace httq
