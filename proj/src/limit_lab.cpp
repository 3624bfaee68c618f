#include "httq/limit_lab.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace httq {

std::vector<double> sample_brownian_values(double variance_rate, const UniformGrid& grid, RandomStream& stream) {
  if (!(variance_rate >= 0.0)) throw std::invalid_argument("variance rate must be nonnegative");
  std::vector<double> v(grid.size(), 0.0);
  const double sd = std::sqrt(variance_rate * grid.step);
  if (sd == 0.0) return v;
  for (std::size_t k = 1; k < v.size(); ++k) v[k] = v[k - 1] + sd * stream.standard_normal();
  return v;
}

CadlagPath sample_brownian(double variance_rate, const UniformGrid& grid, RandomStream& stream) {
  return CadlagPath::on_grid(grid, sample_brownian_values(variance_rate, grid, stream));
}

double renewal_variance(double t, const RenewalTable& M) {
  if (t <= 0.0) return 0.0;
  const double mu = M.mu();
  if (M.linear()) return mu * t;
  if (M.exact_lattice()) {
    const double w = mu * t;
    const double phi = w - std::floor(w * (1.0 + 1e-15) + 1e-12);
    return std::max(0.0, phi * (1.0 - phi));
  }
  // M is linear between grid points, so the trapezoid rule is exact
  const double h = M.step();
  const auto& m = M.values();
  const auto full = std::min(static_cast<std::size_t>(t / h), M.grid().intervals);
  double acc = 0.0;
  for (std::size_t k = 0; k < full; ++k) acc += 0.5 * (m[k] + m[k + 1]) * h;
  const double t0 = full * h;
  if (t > t0) acc += 0.5 * (m[full] + M(t)) * (t - t0);
  return 2.0 * mu * (acc - 0.5 * mu * t * t + 0.5 * t);
}

double covariance_S(double s, double t, const RenewalTable& M, CovarianceForm form) {
  if (s > t) std::swap(s, t);
  if (s <= 0.0) return 0.0;
  if (form == CovarianceForm::stationary_renewal)
    return 0.5 * (renewal_variance(s, M) + renewal_variance(t, M) - renewal_variance(t - s, M));

  const DistributionSpec& H = M.service();
  const double h = M.step();
  double first = 0.0;
  {
    const auto ks = static_cast<std::size_t>(std::ceil(s / h - 1e-9));
    const double d = s / static_cast<double>(ks);
    for (std::size_t k = 0; k < ks; ++k) {
      const double a = k * d, b = a + d;
      first += 0.5 * ((M(a) - a + 0.5) + (M(b) - b + 0.5)) * d;
    }
    first *= 2.0;
  }
  const auto is = static_cast<std::size_t>(std::ceil(s / h - 1e-9));
  const auto js = static_cast<std::size_t>(std::ceil(t / h - 1e-9));
  const double du = s / static_cast<double>(is), dv = t / static_cast<double>(js);
  double second = 0.0;
  for (std::size_t i = 0; i < is; ++i) {
    const double u = (i + 0.5) * du;
    const double Mu = M(s - u);
    for (std::size_t j = 0; j < js; ++j) {
      const double v = (j + 0.5) * dv;
      const double w = u + v;
      const double half = 0.5 * std::min(du, dv);
      second += Mu * M(t - v) * (H.cdf(w + half) - H.cdf(w - half)) / (2.0 * half) * du * dv;
    }
  }
  return first + second;
}

Eigen::MatrixXd covariance_matrix(const UniformGrid& grid, const RenewalTable& M, CovarianceForm form) {
  const auto m = static_cast<Eigen::Index>(grid.intervals);
  Eigen::MatrixXd C(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      C(i, j) = covariance_S(grid.time(static_cast<std::size_t>(j + 1)), grid.time(static_cast<std::size_t>(i + 1)), M, form);
      C(j, i) = C(i, j);
    }
  return C;
}

GaussianPathSampler::GaussianPathSampler(const UniformGrid& grid, Eigen::MatrixXd covariance)
    : grid_(grid), cov_(std::move(covariance)) {
  const Eigen::Index m = cov_.rows();
  if (cov_.cols() != m || static_cast<std::size_t>(m) != grid.intervals)
    throw std::invalid_argument("covariance matrix does not match the grid");
  if (m == 0) return;
  for (double jitter : {1e-12, 1e-10, 1e-8}) {
    Eigen::MatrixXd A = cov_;
    A.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
      lower_ = llt.matrixL();
      jitter_ = jitter;
      return;
    }
  }
  // locate the first leading minor that is not positive at the largest jitter
  Eigen::MatrixXd A = cov_;
  A.diagonal().array() += 1e-8;
  for (Eigen::Index k = 0; k < m; ++k) {
    double d = A(k, k);
    for (Eigen::Index p = 0; p < k; ++p) d -= A(k, p) * A(k, p);
    if (!(d > 0.0)) {
      std::ostringstream os;
      os << "covariance is not positive definite: leading minor of order " << (k + 1) << " (t = " << grid.time(k + 1)
         << ") fails even with jitter 1e-8";
      throw std::runtime_error(os.str());
    }
    A(k, k) = std::sqrt(d);
    for (Eigen::Index i = k + 1; i < m; ++i) {
      double s = A(i, k);
      for (Eigen::Index p = 0; p < k; ++p) s -= A(i, p) * A(k, p);
      A(i, k) = s / A(k, k);
    }
  }
  throw std::runtime_error("covariance factorization failed");
}

GaussianPathSampler::GaussianPathSampler(const UniformGrid& grid, const RenewalTable& M, CovarianceForm form)
    : GaussianPathSampler(grid, covariance_matrix(grid, M, form)) {}

std::vector<double> GaussianPathSampler::sample_values(RandomStream& stream) const {
  const Eigen::Index m = lower_.rows();
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < m; ++i) z(i) = stream.standard_normal();
  const Eigen::VectorXd x = lower_.triangularView<Eigen::Lower>() * z;
  std::vector<double> out(static_cast<std::size_t>(m) + 1, 0.0);
  for (Eigen::Index i = 0; i < m; ++i) out[static_cast<std::size_t>(i) + 1] = x(i);
  return out;
}

NoiseSample sample_noises(double arrival_variance, double service_variance, const UniformGrid& grid,
                          const GaussianPathSampler* sampler, std::uint64_t seed, std::uint64_t replication) {
  RandomStream arrivals(seed, {replication, Purpose::gaussian, 0});
  RandomStream services(seed, {replication, Purpose::gaussian, 1});
  NoiseSample ns;
  ns.seed = seed;
  ns.replication = replication;
  ns.E = sample_brownian_values(arrival_variance, grid, arrivals);
  if (sampler) {
    ns.S = sampler->sample_values(services);
    ns.covariance_source = "cholesky";
  } else {
    ns.S = sample_brownian_values(service_variance, grid, services);
    ns.covariance_source = "brownian";
  }
  return ns;
}

LimitSolution solve_limit_case_i(double xi, const std::vector<double>& E, const std::vector<double>& S, double beta,
                                 double mu, const FunctionTable& g, const UniformGrid& grid) {
  if (xi < 0.0) throw std::invalid_argument("reflected limit needs xi >= 0");
  if (E.size() != grid.size() || S.size() != grid.size()) throw std::invalid_argument("noise does not match the grid");
  std::vector<double> y(grid.size());
  const double rmu = std::sqrt(mu);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = xi + E[k] - rmu * S[k] + beta * mu * grid.time(k);
  MappingSolution sol = solve_skorokhod_g(y, grid, g);
  LimitSolution out{LimitSolution::Case::i, grid, std::move(sol.x), std::move(sol.ell), sol.residual,
                    sol.complementarity, 0};
  return out;
}

LimitSolution solve_limit_case_ii(double xi, const std::vector<double>& E, const std::vector<double>& S, double beta,
                                  double mu, const FunctionTable& g, const RenewalTable& M, const UniformGrid& grid,
                                  PicardOptions opts) {
  if (E.size() != grid.size() || S.size() != grid.size()) throw std::invalid_argument("noise does not match the grid");
  const double xneg = xi < 0.0 ? -xi : 0.0;
  std::vector<double> y(grid.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double t = grid.time(k);
    y[k] = xi + E[k] - S[k] + beta * mu * t + (xneg > 0.0 ? xneg * (mu * t - M(t)) : 0.0);
  }
  opts.drift_sign = -1.0;
  MappingSolution sol = solve_phi_Mg(y, grid, M, g, opts);
  return {LimitSolution::Case::ii, grid, std::move(sol.x), {}, sol.residual, 0.0, sol.iterations};
}

std::vector<double> finite_n_service_noise(const std::vector<double>& initial_residuals,
                                           const std::vector<std::pair<double, double>>& entries, double n,
                                           const RenewalTable& M, const std::vector<double>& ts) {
  const double mu = M.mu();
  const double inv = 1.0 / std::sqrt(n);
  std::vector<double> out(ts.size(), 0.0);
  for (std::size_t q = 0; q < ts.size(); ++q) {
    const double t = ts[q];
    double acc = 0.0;
    for (double v : initial_residuals) {
      if (v <= t) acc += 1.0 + M(t - v);
      acc -= mu * t;
    }
    for (const auto& [kappa, v] : entries) {
      if (kappa > t) continue;
      const double tau = t - kappa;
      if (v <= tau) acc += 1.0 + M(tau - v);
      acc -= M(tau);
    }
    out[q] = acc * inv;
  }
  return out;
}

}  // namespace httq
