#include "httq/regulator_maps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace httq {
namespace {

inline double pos(double x) { return x > 0.0 ? x : 0.0; }
inline double neg(double x) { return x < 0.0 ? -x : 0.0; }

void check_input(const std::vector<double>& y, const UniformGrid& grid) {
  if (y.size() != grid.size()) throw std::invalid_argument("input path must have one value per grid point");
}

// dM on the solver grid, stored sparsely (lattice tables are mostly zeros).
class RenewalKernel {
 public:
  RenewalKernel(const RenewalTable& M, const UniformGrid& grid) {
    if (std::abs(M.step() - grid.step) > 1e-9 * grid.step)
      throw std::invalid_argument("grid is not aligned with the renewal table step");
    if (M.grid().intervals < grid.intervals) throw std::invalid_argument("renewal table is shorter than the grid");
    linear_ = M.linear();
    c_ = M.mu() * grid.step;
    if (!linear_) {
      for (std::size_t j = 1; j <= grid.intervals; ++j) {
        const double d = M.increment(j);
        if (d != 0.0) nz_.emplace_back(j, d);
      }
    }
  }
  bool linear() const { return linear_; }
  double c() const { return c_; }
  // sum_{j=1}^{k} negs[k-j] dM_j
  double conv(const std::vector<double>& negs, std::size_t k) const {
    double acc = 0.0;
    for (const auto& [j, d] : nz_) {
      if (j > k) break;
      acc += negs[k - j] * d;
    }
    return acc;
  }
  const std::vector<std::pair<std::size_t, double>>& nonzero() const { return nz_; }

 private:
  bool linear_ = false;
  double c_ = 0.0;
  std::vector<std::pair<std::size_t, double>> nz_;
};

// Defect of x = y + sign h sum_{i<k} g(x_i^+) + sum_j (x_{k-j})^- dM_j, summed
// in the opposite order from the solvers.
double renewal_defect(const std::vector<double>& x, const std::vector<double>& y, const UniformGrid& grid,
                      const RenewalTable& M, const FunctionTable* g, double sign) {
  const std::size_t m = grid.intervals;
  const double h = grid.step;
  double worst = 0.0, drift = 0.0;
  if (M.linear()) {
    const double c = M.mu() * h;
    double negsum = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
      worst = std::max(worst, std::abs(x[k] - y[k] - sign * h * drift - c * negsum));
      negsum += neg(x[k]);
      if (g) drift += (*g)(pos(x[k]));
    }
    return worst;
  }
  for (std::size_t k = 0; k <= m; ++k) {
    double conv = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double d = M.increment(k - i);
      if (d != 0.0) conv += neg(x[i]) * d;
    }
    worst = std::max(worst, std::abs(x[k] - y[k] - sign * h * drift - conv));
    if (g) drift += (*g)(pos(x[k]));
  }
  return worst;
}

}  // namespace

FunctionTable FunctionTable::tabulate(const std::function<double(double)>& fn, double x_max, double spacing) {
  if (!(x_max > 0.0) || !(spacing > 0.0)) throw std::invalid_argument("bad function table range");
  FunctionTable t;
  t.spacing_ = spacing;
  const auto m = static_cast<std::size_t>(std::ceil(x_max / spacing));
  t.values_.resize(m + 1);
  for (std::size_t k = 0; k <= m; ++k) t.values_[k] = fn(k * spacing);
  if (t.values_.front() != 0.0) throw std::invalid_argument("g must vanish at 0");
  return t;
}

FunctionTable FunctionTable::linear(double slope) {
  FunctionTable t;
  t.slope_ = slope;
  return t;
}

FunctionTable FunctionTable::abandonment_drift(const ScalarFunction& f, double mu, double x_max, double spacing) {
  if (f.kind() == ScalarFunction::Kind::linear) return linear(f.parameter(0));
  return tabulate([&f, mu](double x) { return mu * f(x / mu); }, x_max, spacing);
}

double FunctionTable::operator()(double x) const {
  if (x <= 0.0) return 0.0;
  if (values_.empty()) return slope_ * x;
  const double u = x / spacing_;
  const std::size_t last = values_.size() - 1;
  if (u >= static_cast<double>(last)) {
    const double s = values_[last] - values_[last - 1];
    return values_[last] + s * (u - static_cast<double>(last));
  }
  const auto k = static_cast<std::size_t>(u);
  return values_[k] + (u - static_cast<double>(k)) * (values_[k + 1] - values_[k]);
}

double FunctionTable::lipschitz(double lo, double hi) const {
  if (values_.empty()) return std::abs(slope_);
  lo = std::max(lo, 0.0);
  const std::size_t last = values_.size() - 1;
  auto k0 = static_cast<std::size_t>(lo / spacing_);
  auto k1 = static_cast<std::size_t>(std::ceil(hi / spacing_));
  k0 = std::min(k0, last - 1);
  k1 = std::min(std::max(k1, k0 + 1), last);
  double best = 0.0;
  for (std::size_t k = k0; k < k1; ++k) best = std::max(best, std::abs(values_[k + 1] - values_[k]) / spacing_);
  return best;
}

bool FunctionTable::nondecreasing() const {
  if (values_.empty()) return slope_ >= 0.0;
  for (std::size_t k = 1; k < values_.size(); ++k)
    if (values_[k] < values_[k - 1]) return false;
  return true;
}

CadlagPath MappingSolution::ell_path() const {
  if (ell.empty()) throw std::logic_error(variant + " has no regulator");
  return CadlagPath::on_grid(grid, ell);
}

MappingSolution solve_phi_n_g(const std::vector<double>& y, const UniformGrid& grid, const FunctionTable& g, double mu_n) {
  check_input(y, grid);
  if (!(mu_n > 0.0)) throw std::invalid_argument("mu_n must be positive");
  const double h = grid.step;
  if (h > 0.1 / mu_n * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "grid step " << h << " too large for mu_n = " << mu_n << "; use at most "
       << UniformGrid::covering(grid.horizon(), 0.1 / mu_n).step;
    throw std::invalid_argument(os.str());
  }
  MappingSolution s;
  s.variant = "phi_n_g";
  s.grid = grid;
  const std::size_t m = grid.intervals;
  s.x.resize(m + 1);
  s.x[0] = y[0];
  for (std::size_t k = 0; k < m; ++k)
    s.x[k + 1] = s.x[k] + (y[k + 1] - y[k]) + h * (mu_n * neg(s.x[k]) - g(pos(s.x[k])));
  double acc = 0.0;
  for (std::size_t k = 0; k <= m; ++k) {
    s.residual = std::max(s.residual, std::abs(s.x[k] - y[k] - acc));
    acc += h * (mu_n * neg(s.x[k]) - g(pos(s.x[k])));
  }
  return s;
}

MappingSolution solve_phi_n_g(const CadlagPath& y, const UniformGrid& grid, const FunctionTable& g, double mu_n) {
  return solve_phi_n_g(y.sample(grid), grid, g, mu_n);
}

MappingSolution solve_skorokhod_g(const std::vector<double>& y, const UniformGrid& grid, const FunctionTable& g) {
  check_input(y, grid);
  if (y[0] < 0.0) throw std::invalid_argument("reflection map needs y(0) >= 0");
  const double h = grid.step;
  const std::size_t m = grid.intervals;
  MappingSolution s;
  s.variant = "skorokhod_g";
  s.grid = grid;
  s.x.resize(m + 1);
  s.ell.assign(m + 1, 0.0);
  s.x[0] = y[0];
  for (std::size_t k = 0; k < m; ++k) {
    const double trial = s.x[k] + (y[k + 1] - y[k]) - h * g(s.x[k]);
    const double push = neg(trial);
    s.x[k + 1] = trial + push;
    s.ell[k + 1] = s.ell[k] + push;
    s.complementarity += s.x[k + 1] * push;
  }
  double drift = 0.0;
  for (std::size_t k = 0; k <= m; ++k) {
    s.residual = std::max(s.residual, std::abs(s.x[k] - (y[k] - h * drift + s.ell[k])));
    drift += g(pos(s.x[k]));
  }
  return s;
}

MappingSolution solve_skorokhod_g(const CadlagPath& y, const UniformGrid& grid, const FunctionTable& g) {
  return solve_skorokhod_g(y.sample(grid), grid, g);
}

MappingSolution solve_phi_M(const std::vector<double>& y, const UniformGrid& grid, const RenewalTable& M) {
  check_input(y, grid);
  const RenewalKernel K(M, grid);
  const std::size_t m = grid.intervals;
  MappingSolution s;
  s.variant = "phi_M";
  s.grid = grid;
  s.x.resize(m + 1);
  std::vector<double> negs(m + 1);
  double prefix = 0.0;
  for (std::size_t k = 0; k <= m; ++k) {
    const double conv = K.linear() ? K.c() * prefix : K.conv(negs, k);
    s.x[k] = y[k] + conv;
    negs[k] = neg(s.x[k]);
    prefix += negs[k];
  }
  s.residual = renewal_defect(s.x, y, grid, M, nullptr, 1.0);
  return s;
}

MappingSolution solve_phi_M(const CadlagPath& y, const UniformGrid& grid, const RenewalTable& M) {
  return solve_phi_M(y.sample(grid), grid, M);
}

double renewal_map_bound(const RenewalTable& M, std::size_t steps) {
  const UniformGrid grid(M.step(), steps);
  const RenewalKernel K(M, grid);
  std::vector<double> z(steps + 1);
  double prefix = 0.0, best = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    z[k] = 1.0 + (K.linear() ? K.c() * prefix : K.conv(z, k));
    prefix += z[k];
    best = std::max(best, z[k]);
  }
  return best;
}

MappingSolution solve_phi_Mg(const std::vector<double>& y, const UniformGrid& grid, const RenewalTable& M,
                             const FunctionTable& g, const PicardOptions& opts) {
  check_input(y, grid);
  if (!(opts.tol > 0.0)) throw std::invalid_argument("Picard tolerance must be positive");
  const RenewalKernel K(M, grid);
  const std::size_t m = grid.intervals;
  const double h = grid.step;
  const double sign = opts.drift_sign;

  MappingSolution s;
  s.variant = "phi_Mg";
  s.grid = grid;
  double ysup = 0.0;
  for (double v : y) ysup = std::max(ysup, std::abs(v));
  s.lambda_M = renewal_map_bound(M, m);
  s.lambda_g = g.lipschitz(0.0, 2.0 * s.lambda_M * ysup + 1.0);

  std::size_t W = m + 1;
  if (opts.windowed) {
    const double delta = opts.window.value_or(s.lambda_g > 0.0 ? 2.0 / (3.0 * s.lambda_M * s.lambda_g) : grid.horizon() + h);
    W = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(delta / h + 1e-9)), 1, m + 1);
  }
  s.window = static_cast<double>(W) * h;

  std::vector<double> u = opts.start_from_y ? y : std::vector<double>(m + 1, 0.0);
  std::vector<double> x(m + 1, 0.0), negs(m + 1, 0.0), unew(m + 1);
  std::vector<double> negprefix(m + 2, 0.0);  // sum_{i<k} negs[i]
  double drift_before = 0.0;                  // sum_{i<k0} g(x_i^+)

  auto renewal_pass = [&](std::size_t k0, std::size_t k1) {
    for (std::size_t k = k0; k <= k1; ++k) {
      const double conv = K.linear() ? K.c() * negprefix[k] : K.conv(negs, k);
      x[k] = u[k] + conv;
      negs[k] = neg(x[k]);
      negprefix[k + 1] = negprefix[k] + negs[k];
    }
  };
  // u_new_k = y_k + sign h sum_{i<k} g(x_i^+); returns sup |u_new - u| on the window
  auto drift_pass = [&](std::size_t k0, std::size_t k1) {
    double acc = drift_before, change = 0.0;
    for (std::size_t k = k0; k <= k1; ++k) {
      unew[k] = y[k] + sign * h * acc;
      change = std::max(change, std::abs(unew[k] - u[k]));
      acc += g(pos(x[k]));
    }
    return change;
  };

  for (std::size_t k0 = 0; k0 <= m; k0 += W) {
    const std::size_t k1 = std::min(k0 + W - 1, m);
    double prev_change = -1.0;
    for (;;) {
      if (s.iterations >= opts.max_iterations) {
        std::ostringstream os;
        os << "Picard iteration did not converge in " << opts.max_iterations << " iterations (window starting at t="
           << grid.time(k0) << ", last decay ratio " << s.decay_ratio << ")";
        throw ConvergenceError(os.str(), s.decay_ratio, s.iterations);
      }
      renewal_pass(k0, k1);
      const double change = drift_pass(k0, k1);
      std::copy(unew.begin() + static_cast<long>(k0), unew.begin() + static_cast<long>(k1) + 1,
                u.begin() + static_cast<long>(k0));
      ++s.iterations;
      s.sup_changes.push_back(change);
      if (prev_change > 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + ysup))
        s.decay_ratio = std::max(s.decay_ratio, change / prev_change);
      prev_change = change;
      if (change < opts.tol) {
        renewal_pass(k0, k1);
        const double defect = drift_pass(k0, k1);
        if (defect < 10.0 * opts.tol) break;
      }
    }
    for (std::size_t k = k0; k <= k1; ++k) drift_before += g(pos(x[k]));
  }
  s.x = std::move(x);
  s.residual = renewal_defect(s.x, y, grid, M, &g, sign);
  double xmax = 0.0;
  for (double v : s.x) xmax = std::max(xmax, v);
  s.lambda_g = g.lipschitz(0.0, xmax);
  return s;
}

MappingSolution solve_phi_Mg(const CadlagPath& y, const UniformGrid& grid, const RenewalTable& M,
                             const FunctionTable& g, const PicardOptions& opts) {
  return solve_phi_Mg(y.sample(grid), grid, M, g, opts);
}

}  // namespace httq
