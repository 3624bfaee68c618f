#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "httq/cadlag_path.hpp"
#include "httq/renewal.hpp"
#include "httq/scalar_function.hpp"

namespace httq {

/// Tabulated g on [0, x_max] with uniform spacing, linear interpolation and
/// linear extrapolation past the end. Arguments are clamped at 0.
class FunctionTable {
 public:
  static FunctionTable tabulate(const std::function<double(double)>& fn, double x_max, double spacing);
  /// Exact x -> slope * x.
  static FunctionTable linear(double slope);
  static FunctionTable zero() { return linear(0.0); }
  /// g(x) = mu f(x / mu), the abandonment drift of the limit equations.
  static FunctionTable abandonment_drift(const ScalarFunction& f, double mu, double x_max = 64.0, double spacing = 1e-3);

  double operator()(double x) const;
  /// Largest adjacent-knot slope magnitude on [lo, hi].
  double lipschitz(double lo, double hi) const;
  bool nondecreasing() const;
  bool is_linear() const { return values_.empty(); }
  double slope() const { return slope_; }

 private:
  double spacing_ = 0.0;
  double slope_ = 0.0;  // linear kind
  std::vector<double> values_;
};

struct MappingSolution {
  std::string variant;
  UniformGrid grid;
  std::vector<double> x;
  std::vector<double> ell;  // empty unless the map has a regulator
  /// Sup over the grid of the defect of the discretized defining equation.
  double residual = 0.0;
  /// sum_k x_{k+1} (ell_{k+1} - ell_k); regulator increments act at the right endpoint.
  double complementarity = 0.0;
  int iterations = 0;
  /// Largest ratio of consecutive sup-changes within a Picard window.
  double decay_ratio = 0.0;
  std::vector<double> sup_changes;
  double window = 0.0;
  double lambda_M = 0.0;
  double lambda_g = 0.0;

  CadlagPath x_path() const { return CadlagPath::on_grid(grid, x); }
  CadlagPath ell_path() const;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double ratio, int iterations)
      : std::runtime_error(what), decay_ratio(ratio), iterations(iterations) {}
  double decay_ratio;
  int iterations;
};

/// x(t) = y(t) + mu_n \int_0^t x^- ds - \int_0^t g(x^+) ds, explicit Euler.
/// Refuses steps above 0.1 / mu_n.
MappingSolution solve_phi_n_g(const std::vector<double>& y, const UniformGrid& grid, const FunctionTable& g, double mu_n);
MappingSolution solve_phi_n_g(const CadlagPath& y, const UniformGrid& grid, const FunctionTable& g, double mu_n);

/// x = y - \int g(x^+) + ell >= 0 with ell nondecreasing, increasing only when
/// x = 0. Projected Euler; needs y(0) >= 0.
MappingSolution solve_skorokhod_g(const std::vector<double>& y, const UniformGrid& grid, const FunctionTable& g);
MappingSolution solve_skorokhod_g(const CadlagPath& y, const UniformGrid& grid, const FunctionTable& g);

/// x(t) = y(t) + \int_0^t (x(t-s))^- dM(s); explicit since dM has no atom at 0.
MappingSolution solve_phi_M(const std::vector<double>& y, const UniformGrid& grid, const RenewalTable& M);
MappingSolution solve_phi_M(const CadlagPath& y, const UniformGrid& grid, const RenewalTable& M);

struct PicardOptions {
  double tol = 1e-10;
  /// Iterate on consecutive windows of length delta = 2 / (3 Lambda_M Lambda_g)
  /// (at least one grid step); false iterates on the whole horizon at once.
  bool windowed = true;
  std::optional<double> window;
  bool start_from_y = false;
  int max_iterations = 10000;
  /// +1 solves x = y + \int (x(t-s))^- dM(s) + \int g(x^+); -1 flips the drift.
  double drift_sign = 1.0;
};

MappingSolution solve_phi_Mg(const std::vector<double>& y, const UniformGrid& grid, const RenewalTable& M,
                             const FunctionTable& g, const PicardOptions& opts = {});
MappingSolution solve_phi_Mg(const CadlagPath& y, const UniformGrid& grid, const RenewalTable& M,
                             const FunctionTable& g, const PicardOptions& opts = {});

/// Worst-case discrete amplification of the renewal map on [0, T]:
/// max_k z_k with z_k = 1 + sum_{j<=k} z_{k-j} dM_j.
double renewal_map_bound(const RenewalTable& M, std::size_t steps);

}  // namespace httq
