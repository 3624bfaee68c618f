#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "httq/random_stream.hpp"

namespace httq {

struct Exponential {
  double rate;
};
struct Deterministic {
  double value;
};
struct Erlang {
  int stages;
  double stage_rate;
};
struct Hyperexponential {
  std::vector<double> probs;
  std::vector<double> rates;
};
struct Lognormal {
  double mu;
  double sigma;
};
struct Uniform {
  double lo;
  double hi;
};

/// A nonnegative law on time. Parameters are validated when the spec is built;
/// sampling never throws.
class DistributionSpec {
 public:
  using Params = std::variant<Exponential, Deterministic, Erlang, Hyperexponential, Lognormal, Uniform>;

  static DistributionSpec exponential(double rate);
  static DistributionSpec deterministic(double value);
  static DistributionSpec erlang(int stages, double stage_rate);
  static DistributionSpec hyperexponential(std::vector<double> probs, std::vector<double> rates);
  static DistributionSpec lognormal(double mu, double sigma);
  static DistributionSpec uniform(double lo, double hi);

  /// Compact form used on the command line, e.g. "exp:rate=1",
  /// "erlang:stages=2,rate=4", "hyperexp:probs=0.3/0.7,rates=1/2".
  static DistributionSpec parse(std::string_view text);

  const Params& params() const { return params_; }
  std::string_view family_name() const;
  std::string describe() const;

  double mean() const;
  double variance() const;
  /// Squared coefficient of variation.
  double scv() const { return variance() / (mean() * mean()); }

  double cdf(double x) const;
  double survival(double x) const { return 1.0 - cdf(x); }
  /// E[V; V <= x].
  double partial_expectation(double x) const;
  /// \int_0^x H(u) du.
  double integrated_cdf(double x) const;
  /// Right derivative of the cdf at the origin.
  double density_at_zero() const;
  /// Smallest x with cdf(x) >= p; closed form where one exists.
  double quantile(double p) const;

  double sample(RandomStream& stream) const;

  /// Law of c * V.
  DistributionSpec scaled(double factor) const;

  bool is_deterministic() const { return std::holds_alternative<Deterministic>(params_); }
  bool is_exponential() const;

  friend bool operator==(const DistributionSpec& a, const DistributionSpec& b);

 private:
  explicit DistributionSpec(Params p) : params_(std::move(p)) {}
  Params params_;
};

double standard_normal_cdf(double z);

/// Generalized inverse of a nondecreasing cdf by bisection on [lo, hi]
/// (hi is grown geometrically until cdf(hi) >= p).
template <class Cdf>
double invert_cdf(const Cdf& cdf, double p, double lo = 0.0, double hi = 1.0, double tol = 1e-12) {
  while (cdf(hi) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return hi;
  }
  while (hi - lo > tol * (1.0 + hi)) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace httq
