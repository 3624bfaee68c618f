#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "httq/distribution.hpp"
#include "httq/patience.hpp"

namespace httq {

std::uint64_t fnv1a(std::string_view text);
std::string hex64(std::uint64_t v);

/// X(0) = N + ceil(sqrt(n) xi). `xi_law`, when set, draws xi once per
/// replication from the initial stream; `head_count` overrides both.
struct InitialCondition {
  double xi = 0.0;
  std::optional<DistributionSpec> xi_law;
  std::optional<long> head_count;
};

/// One n-th system of the regime family: N = ceil(n^alpha) servers,
/// per-server rate mu^n = n^(1-alpha) mu, arrival rate n mu (1 + beta/sqrt(n)).
struct SystemConfig {
  double n = 100.0;
  double alpha = 1.0;
  double mu = 1.0;
  double beta = 0.0;
  ArrivalSpec arrival = ArrivalSpec::poisson();
  /// Service law H with mean 1/mu. For alpha < 1 it must be exponential and the
  /// simulator runs it at rate mu^n.
  DistributionSpec service = DistributionSpec::exponential(1.0);
  PatienceSpec patience = PatienceSpec::no_scaling(DistributionSpec::exponential(1.0));
  InitialCondition initial;
  double horizon = 10.0;
  bool abandon = true;

  long servers() const;
  double arrival_rate() const;
  double service_rate() const;
  /// The law actually used for service requirements in the simulator.
  DistributionSpec service_law() const;
  /// Throws std::invalid_argument on regime or parameter inconsistencies.
  void validate() const;
  std::string fingerprint() const;
  std::uint64_t hash() const { return fnv1a(fingerprint()); }
};

}  // namespace httq
