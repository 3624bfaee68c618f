#include "httq/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace httq {
namespace {

double lattice_count(double t, double c) { return std::floor(t / c * (1.0 + 1e-12) + 1e-12); }

}  // namespace

double default_renewal_step(double mu) { return std::min(1e-2, 1.0 / (20.0 * mu)); }

RenewalTable compute_renewal_function(const DistributionSpec& H, double horizon, std::optional<double> step) {
  if (!(horizon > 0.0)) throw std::invalid_argument("renewal horizon must be positive");
  RenewalTable tab;
  tab.service_ = H;
  tab.mu_ = 1.0 / H.mean();
  const double h = step.value_or(default_renewal_step(tab.mu_));
  if (!(h > 0.0)) throw std::invalid_argument("renewal step must be positive");
  tab.requested_step_ = h;
  tab.grid_ = UniformGrid::covering(horizon, h);
  tab.adjusted_ = std::abs(tab.grid_.step - h) > 1e-12 * h;

  const std::size_t m = tab.grid_.intervals;
  const double d = tab.grid_.step;
  tab.m_.assign(m + 1, 0.0);

  if (H.is_deterministic()) {
    const double c = H.mean();
    for (std::size_t k = 0; k <= m; ++k) tab.m_[k] = lattice_count(tab.grid_.time(k), c);
    return tab;
  }
  if (H.is_exponential()) {
    tab.linear_ = true;
    for (std::size_t k = 0; k <= m; ++k) tab.m_[k] = tab.mu_ * tab.grid_.time(k);
    return tab;
  }

  // M linear on each cell turns \int_0^{t_k} H(t_k - s) dM(s) into
  // sum_j dM_j w_{k-j} with w_d = [G((d+1)h) - G(dh)] / h, G = \int H.
  std::vector<double> G(m + 1), w(m);
  for (std::size_t k = 0; k <= m; ++k) G[k] = H.integrated_cdf(k * d);
  for (std::size_t k = 0; k < m; ++k) w[k] = (G[k + 1] - G[k]) / d;
  const double denom = 1.0 - w[0];
  auto& M = tab.m_;
  M[0] = H.cdf(0.0);
  for (std::size_t k = 1; k <= m; ++k) {
    double acc = H.cdf(k * d) - w[0] * M[k - 1];
    for (std::size_t j = 1; j < k; ++j) acc += w[k - j] * (M[j] - M[j - 1]);
    M[k] = acc / denom;
  }
  return tab;
}

double RenewalTable::operator()(double t) const {
  if (t <= 0.0) return m_.front();
  if (t > horizon() * (1.0 + 1e-12)) throw std::out_of_range("renewal table queried beyond its horizon");
  if (exact_lattice()) return lattice_count(t, service_.mean());
  if (linear_) return mu_ * t;
  const double x = t / grid_.step;
  const auto k = std::min(static_cast<std::size_t>(x), grid_.intervals - 1);
  const double frac = x - static_cast<double>(k);
  return m_[k] + frac * (m_[k + 1] - m_[k]);
}

double RenewalTable::residual() const {
  const std::size_t m = grid_.intervals;
  const double d = grid_.step;
  std::vector<double> Hk(m + 1);
  for (std::size_t k = 0; k <= m; ++k) Hk[k] = service_.cdf(k * d);
  double worst = 0.0;
  if (exact_lattice()) {
    const double c = service_.mean();
    for (std::size_t k = 0; k <= m; ++k) {
      const double t = k * d;
      double conv = 0.0;
      for (double s = c; s <= t * (1.0 + 1e-12) + 1e-12; s += c) conv += service_.cdf(t - s + 1e-12);
      worst = std::max(worst, std::abs(m_[k] - Hk[k] - conv));
    }
    return worst;
  }
  for (std::size_t k = 0; k <= m; ++k) {
    double conv = 0.0;
    for (std::size_t j = 1; j <= k; ++j) conv += 0.5 * (Hk[k - j] + Hk[k - j + 1]) * (m_[j] - m_[j - 1]);
    worst = std::max(worst, std::abs(m_[k] - Hk[k] - conv));
  }
  return worst;
}

CadlagPath RenewalTable::path() const {
  if (!exact_lattice()) return CadlagPath::on_grid(grid_, m_);
  const double c = service_.mean();
  std::vector<double> ts{0.0}, vs{0.0};
  for (double k = 1.0; k * c <= horizon() * (1.0 + 1e-12); k += 1.0) {
    ts.push_back(k * c);
    vs.push_back(k);
  }
  return CadlagPath::step(std::move(ts), std::move(vs), std::max(horizon(), ts.back()));
}

void RenewalTable::write_csv(std::ostream& os) const {
  os << "t,M\n";
  os.precision(17);
  for (std::size_t k = 0; k <= grid_.intervals; ++k) os << grid_.time(k) << ',' << m_[k] << '\n';
}

EquilibriumDistribution::EquilibriumDistribution(DistributionSpec H) : service_(std::move(H)), mu_(1.0 / service_.mean()) {
  if (service_.is_exponential())
    analytic_ = DistributionSpec::exponential(mu_);
  else if (service_.is_deterministic())
    analytic_ = DistributionSpec::uniform(0.0, service_.mean());
}

double EquilibriumDistribution::cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (analytic_) return analytic_->cdf(x);
  return std::min(1.0, mu_ * (x - service_.integrated_cdf(x)));
}

double EquilibriumDistribution::quantile(double p) const {
  if (analytic_) return analytic_->quantile(p);
  return invert_cdf([this](double x) { return cdf(x); }, p, 0.0, service_.mean());
}

double EquilibriumDistribution::sample(RandomStream& stream) const {
  if (analytic_) return analytic_->sample(stream);
  return quantile(stream.uniform());
}

CadlagPath EquilibriumDistribution::table(const UniformGrid& grid) const {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = cdf(grid.time(k));
  return CadlagPath::on_grid(grid, v);
}

}  // namespace httq
