#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "httq/event_sim.hpp"
#include "httq/limit_lab.hpp"
#include "httq/scaling.hpp"

namespace httq {

struct GapStatistic {
  std::string name;
  double value = 0.0;
  double n = 0.0;
  double horizon = 0.0;
  std::uint64_t replication = 0;
  std::size_t excluded = 0;  // truncated grid points left out (little_gap)
};

/// sup_t |G(t) - mu \int_0^t f(Q(s)/mu) ds|, exact over breakpoints.
GapStatistic coupling_gap(const ScaledBundle& b, std::uint64_t replication = 0);
/// max over the virtual-wait grid of |mu omega(t) - Q(t)|; a lower bound on the sup.
GapStatistic little_gap(const ScaledBundle& b, std::uint64_t replication = 0);
/// sup_t (X(t))^-
GapStatistic neg_part_sup(const ScaledBundle& b, std::uint64_t replication = 0);

struct ComparisonVerdict {
  bool holds = true;
  std::size_t checked = 0;
  double violation_time = 0.0;
  double q_with = 0.0;
  double q_without = 0.0;
  std::string dump;
};

/// Runs the config with and without abandonment on common streams and checks
/// Q <= Q_0 at every event time of either run.
ComparisonVerdict compare_abandonment(const SystemConfig& config, std::uint64_t seed, std::uint64_t replication = 0);

/// Two-sample Kolmogorov-Smirnov statistic by sorted merge; ties are stepped
/// over together.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Summary {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  std::size_t count = 0;
};
Summary summarize(std::vector<double> values);

struct SweepSpec {
  SystemConfig base;
  std::vector<double> ns;
  std::size_t replications = 200;
  std::vector<double> checkpoints;  // default {T/4, T/2, T}
  std::uint64_t seed = 1;
  std::size_t limit_samples = 0;    // default: replications
  double limit_step = 0.01;
  std::optional<double> omega_step;
  unsigned workers = 0;
  bool with_limit = true;
};

struct SweepLevel {
  double n = 0.0;
  std::map<std::string, Summary> stats;
  std::map<std::string, std::vector<double>> values;  // per replication
  std::vector<std::vector<double>> marginals;         // [checkpoint][replication]
  std::vector<double> ks;                             // per checkpoint
  std::size_t truncated = 0;
};

struct TrendVerdict {
  std::string statistic;
  std::string verdict;  // decreasing, flat, increasing
  bool strictly_decreasing = false;
  double first = 0.0;
  double last = 0.0;
};

struct ConvergenceReport {
  std::vector<double> ns;
  std::vector<double> checkpoints;
  std::size_t replications = 0;
  std::size_t limit_samples = 0;
  std::uint64_t seed = 0;
  std::vector<SweepLevel> levels;
  std::vector<std::vector<double>> limit_marginals;  // [checkpoint][sample]
  std::vector<TrendVerdict> trends;

  const TrendVerdict& trend(const std::string& statistic) const;
};

/// Simulates every n, collects gap statistics and marginals of X at the
/// checkpoints, draws limit samples from the matching limit equation, and
/// reports medians, IQRs, KS distances and trend verdicts.
ConvergenceReport convergence_sweep(const SweepSpec& spec);

/// The limit equation matching a system's regime on a uniform grid: the
/// reflected equation for alpha < 1, the renewal-map equation for alpha = 1
/// (Cholesky-sampled service noise unless H is exponential).
class LimitModel {
 public:
  LimitModel(const SystemConfig& base, double step);

  const UniformGrid& grid() const { return grid_; }
  const SystemConfig& base() const { return base_; }
  bool renewal_case() const { return M_.has_value(); }
  const GaussianPathSampler* sampler() const { return sampler_ ? &*sampler_ : nullptr; }

  NoiseSample noises(std::uint64_t seed, std::uint64_t replication) const;
  double initial_xi(std::uint64_t seed, std::uint64_t replication) const;
  LimitSolution solve(std::uint64_t seed, std::uint64_t replication) const;
  LimitSolution solve(double xi, const NoiseSample& noise) const;

 private:
  SystemConfig base_;
  UniformGrid grid_;
  FunctionTable g_;
  double arrival_var_;
  double service_var_;
  std::optional<RenewalTable> M_;
  std::optional<GaussianPathSampler> sampler_;
};

/// Limit samples of X at the checkpoints for the regime of `base`
/// (reflected limit for alpha < 1, renewal-map limit for alpha = 1).
std::vector<std::vector<double>> limit_marginals(const SystemConfig& base, const std::vector<double>& checkpoints,
                                                 std::size_t samples, double step, std::uint64_t seed, unsigned workers);

/// A random system for the abandonment comparison: regime, service and
/// patience laws, load, size, horizon and initial state all drawn from the
/// initial stream of (seed, index).
SystemConfig random_comparison_config(std::uint64_t seed, std::uint64_t index);

TrendVerdict trend_of(const std::string& statistic, const std::vector<double>& medians);

}  // namespace httq
