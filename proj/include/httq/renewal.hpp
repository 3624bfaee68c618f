#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "httq/cadlag_path.hpp"
#include "httq/distribution.hpp"

namespace httq {

/// Renewal function M(t) = E[# renewals in [0, t]] of service law H on a
/// uniform grid. Continuous H: product-trapezoid scheme with M piecewise
/// linear between grid points. Deterministic H: exact lattice counts.
class RenewalTable {
 public:
  const UniformGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return m_; }
  const DistributionSpec& service() const { return service_; }
  double mu() const { return mu_; }
  double step() const { return grid_.step; }
  double horizon() const { return grid_.horizon(); }
  /// Requested step did not divide the horizon and was shrunk.
  bool grid_adjusted() const { return adjusted_; }
  double requested_step() const { return requested_step_; }
  bool exact_lattice() const { return service_.is_deterministic(); }
  /// All increments equal (exponential H), so convolutions collapse to running sums.
  bool linear() const { return linear_; }

  /// M(t); exact on lattice tables, linear interpolation otherwise.
  double operator()(double t) const;
  /// dM over grid cell j, i.e. M(t_j) - M(t_{j-1}); j >= 1.
  double increment(std::size_t j) const { return m_[j] - m_[j - 1]; }

  /// Sup over the grid of |M - H - \int H(t - s) dM(s)| using an independent
  /// plain trapezoid Stieltjes sum (exact atom sums on lattice tables).
  double residual() const;
  CadlagPath path() const;
  void write_csv(std::ostream& os) const;

 private:
  friend RenewalTable compute_renewal_function(const DistributionSpec&, double, std::optional<double>);
  UniformGrid grid_;
  std::vector<double> m_;
  DistributionSpec service_ = DistributionSpec::exponential(1.0);
  double mu_ = 1.0;
  double requested_step_ = 0.0;
  bool adjusted_ = false;
  bool linear_ = false;
};

double default_renewal_step(double mu);

RenewalTable compute_renewal_function(const DistributionSpec& H, double horizon,
                                      std::optional<double> step = std::nullopt);

/// H_e(x) = mu \int_0^x (1 - H(u)) du.
class EquilibriumDistribution {
 public:
  explicit EquilibriumDistribution(DistributionSpec H);

  const DistributionSpec& service() const { return service_; }
  double mu() const { return mu_; }
  /// Closed form when one exists (exponential -> itself, deterministic -> uniform).
  const std::optional<DistributionSpec>& analytic() const { return analytic_; }

  double cdf(double x) const;
  double quantile(double p) const;
  double sample(RandomStream& stream) const;
  CadlagPath table(const UniformGrid& grid) const;

 private:
  DistributionSpec service_;
  double mu_;
  std::optional<DistributionSpec> analytic_;
};

}  // namespace httq
