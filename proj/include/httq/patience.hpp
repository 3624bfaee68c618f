#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "httq/distribution.hpp"
#include "httq/scalar_function.hpp"

namespace httq {

class PatienceLaw;

/// How the n-th system's patience law F^n is built.
///   no_scaling:  F^n = F for every n; limit f(x) = F'(0) x
///   hazard_rate: F^n(x) = 1 - exp(-\int_0^x h(sqrt(n) t) dt); limit f = \int h
///   direct_f:    F^n(x) = min(1, f(sqrt(n) x) / sqrt(n)); limit f itself
class PatienceSpec {
 public:
  enum class Mode { no_scaling, hazard_rate, direct_f };

  static PatienceSpec no_scaling(DistributionSpec law);
  static PatienceSpec hazard_rate(ScalarFunction h);
  static PatienceSpec direct_f(ScalarFunction f);

  Mode mode() const { return mode_; }
  const DistributionSpec& law() const;
  const ScalarFunction& function() const { return fn_; }
  std::string describe() const;

  /// Patience law of the n-th system.
  PatienceLaw at(double n) const;
  /// The limit function f.
  ScalarFunction limit_f() const;

 private:
  PatienceSpec(Mode m, DistributionSpec law, ScalarFunction fn)
      : mode_(m), law_(std::move(law)), fn_(std::move(fn)) {}
  Mode mode_;
  DistributionSpec law_;
  ScalarFunction fn_;  // h for hazard_rate, f for direct_f, the limit f otherwise
};

class PatienceLaw {
 public:
  double cdf(double x) const;
  /// Inverse-transform draw; may be +inf when F^n has mass at infinity.
  double sample(RandomStream& stream) const;
  double n() const { return n_; }

 private:
  friend class PatienceSpec;
  PatienceLaw(const PatienceSpec& spec, double n) : spec_(spec), n_(n), root_n_(std::sqrt(n)) {}
  PatienceSpec spec_;
  double n_;
  double root_n_;
};

/// Renewal arrival input: a base interarrival law with mean 1, run at rate
/// lambda^n = n mu (1 + beta / sqrt(n)).
class ArrivalSpec {
 public:
  explicit ArrivalSpec(DistributionSpec base);
  static ArrivalSpec poisson() { return ArrivalSpec(DistributionSpec::exponential(1.0)); }

  const DistributionSpec& base() const { return base_; }
  double scv() const { return base_.scv(); }
  static double rate(double n, double mu, double beta);
  /// Interarrival law at rate lambda.
  DistributionSpec interarrival(double lambda) const { return base_.scaled(1.0 / lambda); }

 private:
  DistributionSpec base_;
};

}  // namespace httq
