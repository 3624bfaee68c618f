#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "httq/cadlag_path.hpp"
#include "httq/distribution.hpp"
#include "httq/random_stream.hpp"
#include "httq/regulator_maps.hpp"
#include "httq/renewal.hpp"
#include "httq/scalar_function.hpp"

namespace httq {

/// Gaussian random walk with increment variance rate * h, linearly interpolated.
CadlagPath sample_brownian(double variance_rate, const UniformGrid& grid, RandomStream& stream);
std::vector<double> sample_brownian_values(double variance_rate, const UniformGrid& grid, RandomStream& stream);

/// V(t) = 2 mu \int_0^t (M(u) - mu u + 1/2) du, the variance function of the
/// stationary renewal counting process of H (t for exponential H with mu = 1).
double renewal_variance(double t, const RenewalTable& M);

enum class CovarianceForm {
  /// (V(s) + V(t) - V(t - s)) / 2
  stationary_renewal,
  /// First-term-plus-double-integral display read literally:
  /// 2 \int_0^s (M(u) - u + 1/2) du + \int_0^s \int_0^t M(s-u) M(t-v) dH(u+v),
  /// with dH(u+v) taken as H'(u+v) du dv.
  literal_double_integral,
};

/// Covariance of the service noise at (s, t); symmetric in its arguments.
double covariance_S(double s, double t, const RenewalTable& M, CovarianceForm form = CovarianceForm::stationary_renewal);

/// Covariance matrix on the positive grid times t_1..t_m.
Eigen::MatrixXd covariance_matrix(const UniformGrid& grid, const RenewalTable& M,
                                  CovarianceForm form = CovarianceForm::stationary_renewal);

/// Cholesky sampler with escalating diagonal jitter 1e-12, 1e-10, 1e-8.
class GaussianPathSampler {
 public:
  GaussianPathSampler(const UniformGrid& grid, Eigen::MatrixXd covariance);
  GaussianPathSampler(const UniformGrid& grid, const RenewalTable& M,
                      CovarianceForm form = CovarianceForm::stationary_renewal);

  const UniformGrid& grid() const { return grid_; }
  double jitter() const { return jitter_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }

  /// Values at t_0 = 0 (always 0), t_1, ..., t_m.
  std::vector<double> sample_values(RandomStream& stream) const;
  CadlagPath sample(RandomStream& stream) const { return CadlagPath::on_grid(grid_, sample_values(stream)); }

 private:
  UniformGrid grid_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd lower_;
  double jitter_ = 0.0;
};

struct NoiseSample {
  std::vector<double> E;
  std::vector<double> S;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  std::string covariance_source;
};

/// Independent arrival and service noises for one limit sample. Arrival noise
/// is Brownian with rate arrival_variance; service noise is Brownian with rate
/// service_variance when `sampler` is null, otherwise drawn from it.
NoiseSample sample_noises(double arrival_variance, double service_variance, const UniformGrid& grid,
                          const GaussianPathSampler* sampler, std::uint64_t seed, std::uint64_t replication);

struct LimitSolution {
  enum class Case { i, ii };
  Case which;
  UniformGrid grid;
  std::vector<double> X;
  std::vector<double> L;  // case i only
  double residual = 0.0;
  double complementarity = 0.0;
  int iterations = 0;

  CadlagPath X_path() const { return CadlagPath::on_grid(grid, X); }
  double at_end() const { return X.back(); }
};

/// X = xi + E - sqrt(mu) S + beta mu t - mu \int f(X^+ / mu) + L, X >= 0.
LimitSolution solve_limit_case_i(double xi, const std::vector<double>& E, const std::vector<double>& S, double beta,
                                 double mu, const FunctionTable& g, const UniformGrid& grid);

/// X = xi + E - S + beta mu t + xi^- (mu t - M(t)) + \int (X(t-s))^- dM(s) - mu \int f(X^+ / mu).
LimitSolution solve_limit_case_ii(double xi, const std::vector<double>& E, const std::vector<double>& S, double beta,
                                  double mu, const FunctionTable& g, const RenewalTable& M, const UniformGrid& grid,
                                  PicardOptions opts = {});

/// Direct finite-n service noise: with initial residuals v_j of the N
/// customers in service and the (entry time, service) pairs of later entrants,
/// returns the noise divided by sqrt(n) at each time in `ts`. Renewal counts of H
/// are evaluated through M.
std::vector<double> finite_n_service_noise(const std::vector<double>& initial_residuals,
                                           const std::vector<std::pair<double, double>>& entries, double n,
                                           const RenewalTable& M, const std::vector<double>& ts);

}  // namespace httq
