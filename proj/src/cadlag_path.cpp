#include "httq/cadlag_path.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace httq {

UniformGrid::UniformGrid(double step_, std::size_t intervals_) : step(step_), intervals(intervals_) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("grid step must be positive");
}

UniformGrid UniformGrid::covering(double horizon, double max_step) {
  if (!(horizon > 0.0) || !(max_step > 0.0)) throw std::invalid_argument("grid needs positive horizon and step");
  const auto m = static_cast<std::size_t>(std::ceil(horizon / max_step - 1e-9));
  return UniformGrid(horizon / static_cast<double>(std::max<std::size_t>(m, 1)), std::max<std::size_t>(m, 1));
}

std::vector<double> UniformGrid::times() const {
  std::vector<double> ts(size());
  for (std::size_t k = 0; k < ts.size(); ++k) ts[k] = time(k);
  return ts;
}

CadlagPath::CadlagPath(std::vector<double> times, std::vector<double> values, std::vector<double> slopes,
                       double horizon)
    : times_(std::move(times)), values_(std::move(values)), slopes_(std::move(slopes)), horizon_(horizon) {
  if (times_.empty() || times_.size() != values_.size() || times_.size() != slopes_.size())
    throw std::invalid_argument("path needs matching breakpoints, values and slopes");
  if (times_.front() != 0.0) throw std::invalid_argument("path must start at time 0");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1])) throw std::invalid_argument("path breakpoints must be strictly increasing");
  if (!(horizon_ >= times_.back())) throw std::invalid_argument("path horizon precedes its last breakpoint");
}

CadlagPath CadlagPath::constant(double c, double horizon) { return CadlagPath({0.0}, {c}, {0.0}, horizon); }

CadlagPath CadlagPath::affine(double a, double b, double horizon) { return CadlagPath({0.0}, {a}, {b}, horizon); }

CadlagPath CadlagPath::step(std::vector<double> times, std::vector<double> values, double horizon) {
  std::vector<double> slopes(times.size(), 0.0);
  return CadlagPath(std::move(times), std::move(values), std::move(slopes), horizon);
}

CadlagPath CadlagPath::linear(const std::vector<double>& times, const std::vector<double>& values, double horizon) {
  if (times.size() != values.size() || times.empty()) throw std::invalid_argument("linear path needs points");
  std::vector<double> slopes(times.size(), 0.0);
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    slopes[i] = (values[i + 1] - values[i]) / (times[i + 1] - times[i]);
  return CadlagPath(times, values, std::move(slopes), horizon);
}

CadlagPath CadlagPath::on_grid(const UniformGrid& grid, const std::vector<double>& values) {
  if (values.size() != grid.size()) throw std::invalid_argument("grid path needs one value per grid point");
  return linear(grid.times(), values, grid.horizon());
}

bool CadlagPath::is_step() const {
  return std::all_of(slopes_.begin(), slopes_.end(), [](double s) { return s == 0.0; });
}

std::size_t CadlagPath::segment_at(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
}

double CadlagPath::operator()(double t) const {
  if (t < 0.0 || t > horizon_ * (1.0 + 1e-12) + 1e-12) throw std::out_of_range("path evaluated outside [0, horizon]");
  const std::size_t k = segment_at(t);
  return values_[k] + slopes_[k] * (t - times_[k]);
}

double CadlagPath::left_limit(double t) const {
  if (t <= 0.0) return values_.front();
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
  return values_[k] + slopes_[k] * (t - times_[k]);
}

double CadlagPath::sup(double a, double b) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = segment_at(a); k < times_.size() && times_[k] <= b; ++k) {
    const double lo = std::max(times_[k], a);
    const double hi = std::min(end_of(k), b);
    best = std::max(best, values_[k] + slopes_[k] * (lo - times_[k]));
    best = std::max(best, values_[k] + slopes_[k] * (hi - times_[k]));
  }
  return best;
}

double CadlagPath::inf(double a, double b) const {
  return -((*this) * -1.0).sup(a, b);
}

double CadlagPath::sup_norm(double a, double b) const { return std::max(std::abs(sup(a, b)), std::abs(inf(a, b))); }

double CadlagPath::integral(double a, double b) const {
  if (b <= a) return 0.0;
  double acc = 0.0;
  for (std::size_t k = segment_at(a); k < times_.size() && times_[k] < b; ++k) {
    const double lo = std::max(times_[k], a) - times_[k];
    const double hi = std::min(end_of(k), b) - times_[k];
    acc += values_[k] * (hi - lo) + 0.5 * slopes_[k] * (hi * hi - lo * lo);
  }
  return acc;
}

CadlagPath CadlagPath::integrated() const {
  if (!is_step()) throw std::logic_error("integrated() needs a step path");
  std::vector<double> cum(times_.size(), 0.0);
  for (std::size_t k = 1; k < times_.size(); ++k) cum[k] = cum[k - 1] + values_[k - 1] * (times_[k] - times_[k - 1]);
  return CadlagPath(times_, std::move(cum), values_, horizon_);
}

CadlagPath CadlagPath::compose(const std::function<double(double)>& fn) const {
  std::vector<double> vals(times_.size()), slopes(times_.size(), 0.0);
  for (std::size_t k = 0; k < times_.size(); ++k) {
    vals[k] = fn(values_[k]);
    if (slopes_[k] != 0.0) {
      const double len = end_of(k) - times_[k];
      if (len > 0.0) slopes[k] = (fn(values_[k] + slopes_[k] * len) - vals[k]) / len;
    }
  }
  return CadlagPath(times_, std::move(vals), std::move(slopes), horizon_);
}

CadlagPath CadlagPath::split_at_zero() const {
  std::vector<double> ts, vs, ss;
  ts.reserve(times_.size());
  for (std::size_t k = 0; k < times_.size(); ++k) {
    ts.push_back(times_[k]);
    vs.push_back(values_[k]);
    ss.push_back(slopes_[k]);
    if (slopes_[k] != 0.0) {
      const double root = times_[k] - values_[k] / slopes_[k];
      if (root > times_[k] && root < end_of(k)) {
        ts.push_back(root);
        vs.push_back(0.0);
        ss.push_back(slopes_[k]);
      }
    }
  }
  return CadlagPath(std::move(ts), std::move(vs), std::move(ss), horizon_);
}

CadlagPath CadlagPath::positive_part() const {
  CadlagPath p = split_at_zero();
  for (std::size_t k = 0; k < p.times_.size(); ++k) {
    const double mid = p.values_[k] + 0.5 * p.slopes_[k] * (p.end_of(k) - p.times_[k]);
    const bool keep = p.slopes_[k] == 0.0 ? p.values_[k] > 0.0 : mid > 0.0;
    if (!keep) {
      p.values_[k] = 0.0;
      p.slopes_[k] = 0.0;
    } else if (p.values_[k] < 0.0) {
      p.values_[k] = 0.0;
    }
  }
  return p;
}

CadlagPath CadlagPath::negative_part() const { return ((*this) * -1.0).positive_part(); }

CadlagPath CadlagPath::combine(const CadlagPath& other, double sign) const {
  if (std::abs(horizon_ - other.horizon_) > 1e-9 * (1.0 + std::abs(horizon_)))
    throw std::invalid_argument("paths have mismatched horizons");
  std::vector<double> ts;
  ts.reserve(times_.size() + other.times_.size());
  std::merge(times_.begin(), times_.end(), other.times_.begin(), other.times_.end(), std::back_inserter(ts));
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<double> vs(ts.size()), ss(ts.size());
  std::size_t i = 0, j = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    while (i + 1 < times_.size() && times_[i + 1] <= t) ++i;
    while (j + 1 < other.times_.size() && other.times_[j + 1] <= t) ++j;
    vs[k] = values_[i] + slopes_[i] * (t - times_[i]) + sign * (other.values_[j] + other.slopes_[j] * (t - other.times_[j]));
    ss[k] = slopes_[i] + sign * other.slopes_[j];
  }
  return CadlagPath(std::move(ts), std::move(vs), std::move(ss), std::max(horizon_, other.horizon_));
}

CadlagPath CadlagPath::operator+(const CadlagPath& other) const { return combine(other, 1.0); }
CadlagPath CadlagPath::operator-(const CadlagPath& other) const { return combine(other, -1.0); }

CadlagPath CadlagPath::operator*(double c) const {
  CadlagPath p = *this;
  for (auto& v : p.values_) v *= c;
  for (auto& s : p.slopes_) s *= c;
  return p;
}

CadlagPath CadlagPath::operator+(double c) const {
  CadlagPath p = *this;
  for (auto& v : p.values_) v += c;
  return p;
}

std::vector<double> CadlagPath::sample(const std::vector<double>& ts) const {
  std::vector<double> out(ts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts[i];
    if (i > 0 && t >= ts[i - 1]) {
      while (k + 1 < times_.size() && times_[k + 1] <= t) ++k;
    } else {
      k = segment_at(t);
    }
    out[i] = values_[k] + slopes_[k] * (t - times_[k]);
  }
  return out;
}

void CadlagPath::write_csv(std::ostream& os, double densify_step) const {
  os << "t,value\n";
  os.precision(17);
  if (densify_step > 0.0) {
    const UniformGrid g = UniformGrid::covering(horizon_, densify_step);
    const auto ts = g.times();
    const auto vs = sample(ts);
    for (std::size_t i = 0; i < ts.size(); ++i) os << ts[i] << ',' << vs[i] << '\n';
    return;
  }
  for (std::size_t k = 0; k < times_.size(); ++k) os << times_[k] << ',' << values_[k] << '\n';
  os << horizon_ << ',' << at_end() << '\n';
}

void StepPathBuilder::set(double t, double v) {
  if (t < times_.back()) throw std::invalid_argument("step path updates must be in time order");
  if (t == times_.back()) {
    values_.back() = v;
    return;
  }
  if (v == values_.back()) return;
  times_.push_back(t);
  values_.push_back(v);
}

CadlagPath StepPathBuilder::finish(double horizon) const { return CadlagPath::step(times_, values_, horizon); }

}  // namespace httq
