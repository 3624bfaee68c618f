#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "httq/renewal.hpp"

using namespace httq;

namespace {

double erlang2_renewal(double t, double mu) { return mu * t - 0.25 + 0.25 * std::exp(-4.0 * mu * t); }

// Monte-Carlo renewal count N(t) = #{k >= 1 : V_1 + ... + V_k <= t}.
std::vector<double> renewal_counts(const DistributionSpec& H, const std::vector<double>& ts, int paths,
                                   std::uint64_t seed) {
  std::vector<double> mean(ts.size(), 0.0);
  RandomStream s(seed, {0, Purpose::services, 0});
  const double T = ts.back();
  for (int p = 0; p < paths; ++p) {
    double clock = H.sample(s);
    std::size_t i = 0;
    long count = 0;
    while (i < ts.size()) {
      if (clock <= ts[i] && clock <= T) {
        ++count;
        clock += H.sample(s);
      } else {
        mean[i] += static_cast<double>(count);
        ++i;
      }
    }
  }
  for (auto& m : mean) m /= paths;
  return mean;
}

}  // namespace

TEST_SUITE("renewal_kit") {

TEST_CASE("exponential H gives M(t) = mu t within 1e-4 on [0, 10/mu]") {
  for (double mu : {0.5, 1.0, 2.0}) {
    const RenewalTable M = compute_renewal_function(DistributionSpec::exponential(mu), 10.0 / mu);
    double dev = 0.0;
    for (std::size_t k = 0; k < M.grid().size(); ++k) dev = std::max(dev, std::abs(M.values()[k] - mu * M.grid().time(k)));
    CHECK(dev <= 1e-4);
  }
}

TEST_CASE("general scheme on a one-component hyperexponential reproduces mu t") {
  const double mu = 1.3;
  const RenewalTable M = compute_renewal_function(DistributionSpec::hyperexponential({1.0}, {mu}), 10.0 / mu);
  CHECK_FALSE(M.linear());
  double dev = 0.0;
  for (std::size_t k = 0; k < M.grid().size(); ++k) dev = std::max(dev, std::abs(M.values()[k] - mu * M.grid().time(k)));
  CHECK(dev <= 1e-4);
}

TEST_CASE("deterministic H counts lattice renewals with right-continuity") {
  const double mu = 2.0;
  const RenewalTable M = compute_renewal_function(DistributionSpec::deterministic(1.0 / mu), 5.0);
  CHECK(M.exact_lattice());
  CHECK(M(2.5 / mu) == 2.0);
  CHECK(M(1.0 / mu) == 1.0);
  CHECK(M(0.999 / mu) == 0.0);
  CHECK(M(3.0 / mu) == 3.0);
  CHECK(M(0.0) == 0.0);
  CHECK(M.residual() <= 1e-12);
}

TEST_CASE("erlang-2 closed form is confirmed by Monte-Carlo renewal counting before use") {
  const double mu = 1.0;
  const auto H = DistributionSpec::erlang(2, 2.0 * mu);
  const std::vector<double> ts{0.25, 0.5, 1.0, 2.0, 4.0};
  const int paths = 200000;
  const auto mc = renewal_counts(H, ts, paths, 3);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    // Var N(t) <= E N(t) + 2 E N(t)^2 bounds the standard error loosely from above
    const double m = erlang2_renewal(ts[i], mu);
    const double se = std::sqrt((m + m * m) / paths);
    CAPTURE(ts[i]);
    CHECK(std::abs(mc[i] - m) <= 4.0 * se + 1e-3);
  }
  const RenewalTable M = compute_renewal_function(H, 10.0);
  double dev = 0.0;
  for (std::size_t k = 0; k < M.grid().size(); ++k)
    dev = std::max(dev, std::abs(M.values()[k] - erlang2_renewal(M.grid().time(k), mu)));
  CHECK(dev <= 1e-3);
}

TEST_CASE("table invariants: monotone, M >= H, M(0) = H(0), residual <= 5 step") {
  for (const auto& H : {DistributionSpec::erlang(3, 3.0), DistributionSpec::lognormal(-0.125, 0.5),
                        DistributionSpec::uniform(0.2, 1.8), DistributionSpec::hyperexponential({0.4, 0.6}, {0.5, 3.0})}) {
    CAPTURE(H.describe());
    const RenewalTable M = compute_renewal_function(H, 8.0);
    const auto& v = M.values();
    CHECK(v[0] == doctest::Approx(H.cdf(0.0)));
    for (std::size_t k = 1; k < v.size(); ++k) {
      REQUIRE(v[k] >= v[k - 1]);
      REQUIRE(v[k] >= H.cdf(M.grid().time(k)) - 1e-12);
    }
    CHECK(M.residual() <= 5.0 * M.step());
  }
}

TEST_CASE("second-order renewal asymptote at T = 20/mu") {
  // M(t) - mu t -> (scv - 1) / 2 for nonlattice H
  for (double mu : {0.5, 2.0}) {
    const auto H = DistributionSpec::erlang(2, 2.0 * mu);
    const double T = 20.0 / mu;
    const RenewalTable M = compute_renewal_function(H, T);
    CHECK(std::abs(M(T) - mu * T - (H.scv() - 1.0) / 2.0) <= 1e-3);
  }
}

TEST_CASE("halving the step shrinks the change at first order or better") {
  const auto H = DistributionSpec::erlang(2, 2.0);
  const double T = 5.0;
  const RenewalTable a = compute_renewal_function(H, T, 0.04);
  const RenewalTable b = compute_renewal_function(H, T, 0.02);
  const RenewalTable c = compute_renewal_function(H, T, 0.01);
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t k = 0; k < a.grid().size(); ++k) {
    const double t = a.grid().time(k);
    d1 = std::max(d1, std::abs(a.values()[k] - b(t)));
    d2 = std::max(d2, std::abs(b(t) - c(t)));
  }
  const double ratio = d2 / d1;
  CAPTURE(ratio);
  CHECK(ratio >= 0.2);
  CHECK(ratio <= 0.8);
}

TEST_CASE("step handling: default, adjustment when it does not divide T") {
  CHECK(default_renewal_step(1.0) == doctest::Approx(0.01));
  CHECK(default_renewal_step(10.0) == doctest::Approx(0.005));
  const RenewalTable M = compute_renewal_function(DistributionSpec::erlang(2, 2.0), 1.0, 0.003);
  CHECK(M.grid_adjusted());
  CHECK(M.requested_step() == 0.003);
  CHECK(M.step() <= 0.003);
  CHECK(M.horizon() == doctest::Approx(1.0));
  const RenewalTable N = compute_renewal_function(DistributionSpec::erlang(2, 2.0), 1.0, 0.01);
  CHECK_FALSE(N.grid_adjusted());
}

TEST_CASE("equilibrium distribution closed forms") {
  const double mu = 1.5;
  const EquilibriumDistribution e(DistributionSpec::exponential(mu));
  REQUIRE(e.analytic());
  CHECK(*e.analytic() == DistributionSpec::exponential(mu));
  const EquilibriumDistribution d(DistributionSpec::deterministic(1.0 / mu));
  REQUIRE(d.analytic());
  CHECK(*d.analytic() == DistributionSpec::uniform(0.0, 1.0 / mu));
  CHECK(d.cdf(0.5 / mu) == doctest::Approx(0.5));
}

TEST_CASE("erlang-2 H_e at 1/(2 mu) matches quadrature of mu int (1 - H) to 1e-8") {
  const double mu = 0.8, lam = 2.0 * mu;
  const auto H = DistributionSpec::erlang(2, lam);
  const EquilibriumDistribution he(H);
  const double x = 1.0 / (2.0 * mu);
  // composite Simpson with 2000 panels on the survival function
  const int m = 2000;
  const double h = x / m;
  double acc = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * (1.0 - H.cdf(i * h));
  }
  const double quad = mu * acc * h / 3.0;
  CHECK(std::abs(he.cdf(x) - quad) <= 1e-8);
}

TEST_CASE("H_e is a distribution: starts at 0, monotone, reaches 1 by 50/mu") {
  for (const auto& H : {DistributionSpec::erlang(2, 2.0), DistributionSpec::lognormal(-0.125, 0.5),
                        DistributionSpec::hyperexponential({0.4, 0.6}, {0.5, 3.0})}) {
    const EquilibriumDistribution he(H);
    CHECK(he.cdf(0.0) == 0.0);
    double prev = 0.0;
    for (double x = 0.01; x < 10.0; x += 0.01) {
      const double v = he.cdf(x);
      REQUIRE(v >= prev - 1e-15);
      prev = v;
    }
    CHECK(std::abs(he.cdf(50.0 / he.mu()) - 1.0) <= 1e-3);
  }
}

TEST_CASE("H_e sampler matches its cdf") {
  const EquilibriumDistribution he(DistributionSpec::erlang(3, 3.0));
  RandomStream s(2, {0, Purpose::initial, 0});
  std::vector<double> v(50000);
  for (auto& x : v) x = he.sample(s);
  CHECK(testing::one_sample_ks(v, [&](double x) { return he.cdf(x); }) < 0.02);
}

TEST_CASE("CSV export carries t and M columns") {
  const RenewalTable M = compute_renewal_function(DistributionSpec::exponential(1.0), 1.0);
  std::ostringstream os;
  M.write_csv(os);
  const std::string s = os.str();
  CHECK(s.rfind("t,M\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(M.grid().size()) + 1);
}

}
