#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "helpers.hpp"
#include "httq/event_sim.hpp"

using namespace httq;

namespace {

// Single-server deterministic queue: interarrival 1, service v, starting empty.
SystemConfig dd1(double v, double horizon) {
  SystemConfig c;
  c.n = 1.0;
  c.alpha = 1.0;
  c.mu = 1.0 / v;
  c.beta = v - 1.0;  // lambda = mu (1 + beta) = 1
  c.arrival = ArrivalSpec(DistributionSpec::deterministic(1.0));
  c.service = DistributionSpec::deterministic(v);
  c.abandon = false;
  c.initial.head_count = 0;
  c.horizon = horizon;
  return c;
}

std::vector<SystemConfig> assorted_configs() {
  std::vector<SystemConfig> out;
  SystemConfig a;
  a.n = 50;
  a.beta = -0.5;
  a.horizon = 8.0;
  a.initial.xi = 1.0;
  a.patience = PatienceSpec::no_scaling(DistributionSpec::exponential(2.0));
  out.push_back(a);
  SystemConfig b = a;
  b.service = DistributionSpec::erlang(2, 2.0);
  b.arrival = ArrivalSpec(DistributionSpec::hyperexponential({0.5, 0.5}, {2.0, 2.0 / 3.0}));
  b.beta = 1.0;
  b.initial.xi = -0.5;
  out.push_back(b);
  SystemConfig c = a;
  c.alpha = 0.5;
  c.n = 100;
  c.patience = PatienceSpec::hazard_rate(ScalarFunction::linear(1.0));
  out.push_back(c);
  SystemConfig d = a;
  d.service = DistributionSpec::deterministic(1.0);
  d.patience = PatienceSpec::no_scaling(DistributionSpec::deterministic(0.3));
  d.beta = 2.0;
  out.push_back(d);
  SystemConfig e = a;
  e.alpha = 0.0;
  e.n = 20;
  e.patience = PatienceSpec::direct_f(ScalarFunction::linear(0.5));
  out.push_back(e);
  return out;
}

}  // namespace

TEST_SUITE("event_sim") {

TEST_CASE("no input and an empty start leave every path at zero") {
  SystemConfig c = dd1(0.5, 0.5);  // first arrival at t = 1 > T
  const SimRecord r = simulate(c, 1);
  CHECK(r.events.empty());
  for (double t : {0.0, 0.25, 0.5}) {
    CHECK(r.X()(t) == 0.0);
    CHECK(r.E()(t) == 0.0);
    CHECK(r.S()(t) == 0.0);
    CHECK(r.G()(t) == 0.0);
    CHECK(r.Q()(t) == 0.0);
  }
}

TEST_CASE("initial head count split and initial queue patience") {
  SystemConfig c;
  c.n = 100;
  c.initial.xi = 0.5;
  c.patience = PatienceSpec::no_scaling(DistributionSpec::exponential(50.0));
  c.horizon = 0.05;
  const SimRecord r = simulate(c, 3);
  CHECK(r.servers == 100);
  CHECK(r.initial_count == 105);
  CHECK(r.initial_queue == 5);
  for (long id = -4; id <= 0; ++id) {
    CHECK(r.customer(id).initial);
    CHECK(std::isinf(r.customer(id).patience));
    CHECK(r.customer(id).outcome != Outcome::abandoned);
  }
  c.initial.xi = -0.3;
  const SimRecord s = simulate(c, 3);
  CHECK(s.initial_count == 97);
  CHECK(s.initial_queue == 0);
}

TEST_CASE("initial residual service: H_e for alpha = 1, exponential(mu^n) for alpha < 1") {
  SystemConfig c;
  c.n = 400;
  c.mu = 2.0;
  c.service = DistributionSpec::deterministic(0.5);
  c.horizon = 1e-9;
  std::vector<double> v;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const SimRecord r = simulate(c, 5, rep);
    for (const auto& cu : r.customers)
      if (cu.initial && !std::isnan(cu.service)) v.push_back(cu.service);
  }
  // H_e = uniform(0, 1/mu)
  CHECK(testing::one_sample_ks(v, [](double x) { return std::clamp(2.0 * x, 0.0, 1.0); }) < 0.03);

  SystemConfig d;
  d.n = 400;
  d.alpha = 0.5;
  d.mu = 1.0;
  d.horizon = 1e-9;
  std::vector<double> w;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const SimRecord r = simulate(d, 5, rep);
    for (const auto& cu : r.customers)
      if (cu.initial && !std::isnan(cu.service)) w.push_back(cu.service);
  }
  const double rate = d.service_rate();
  CHECK(rate == doctest::Approx(20.0));
  CHECK(testing::one_sample_ks(w, [&](double x) { return 1.0 - std::exp(-rate * x); }) < 0.03);
}

TEST_CASE("balance, queue split, work conservation and monotone counts at every event") {
  std::uint64_t rep = 0;
  for (const auto& cfg : assorted_configs()) {
    const SimRecord r = simulate(cfg, 17, rep++);
    const CadlagPath X = r.X(), E = r.E(), S = r.S(), G = r.G(), Q = r.Q(), B = r.busy(), K = r.K();
    const double N = static_cast<double>(r.servers);
    double prevE = 0, prevS = 0, prevG = 0, prevK = 0;
    for (const auto& e : r.events) {
      const double t = e.time;
      REQUIRE(X(t) == r.initial_count + E(t) - S(t) - G(t));
      REQUIRE(Q(t) == std::max(X(t) - N, 0.0));
      REQUIRE(B(t) == std::min(X(t), N));
      REQUIRE(E(t) >= prevE);
      REQUIRE(S(t) >= prevS);
      REQUIRE(G(t) >= prevG);
      REQUIRE(K(t) >= prevK);
      prevE = E(t), prevS = S(t), prevG = G(t), prevK = K(t);
    }
    long abandoned = 0;
    for (const auto& c : r.customers) abandoned += c.outcome == Outcome::abandoned;
    CHECK(abandoned == r.abandonments());
    CHECK(G(cfg.horizon) == static_cast<double>(abandoned));
  }
}

TEST_CASE("FCFS entry order, exact abandonment epochs, and zero replay discrepancy") {
  std::uint64_t rep = 0;
  for (const auto& cfg : assorted_configs()) {
    const SimRecord r = simulate(cfg, 23, rep++);
    double last_start = -1.0;
    long last_id = -1000000;
    for (const auto& c : r.customers) {
      if (c.initial && c.id <= -r.initial_queue) continue;  // initially in service
      if (std::isnan(c.service_start)) continue;
      REQUIRE(c.id > last_id);
      REQUIRE(c.service_start >= last_start);
      last_start = c.service_start;
      last_id = c.id;
    }
    for (const auto& c : r.customers)
      if (c.outcome == Outcome::abandoned) REQUIRE(std::abs(c.exit - c.arrival - c.patience) <= 1e-12 * (1.0 + c.exit));
    CHECK(replay_discrepancy(r) <= 1e-9);
  }
}

TEST_CASE("K counts service entries of customers not initially in service") {
  SystemConfig c = assorted_configs()[0];
  const SimRecord r = simulate(c, 4);
  long entries = 0;
  for (const auto& e : r.events) entries += e.kind == EventKind::service_start;
  CHECK(r.K()(c.horizon) == static_cast<double>(entries));
}

TEST_CASE("abandonment off gives G = 0 and infinite recorded patience") {
  SystemConfig c = assorted_configs()[0];
  c.abandon = false;
  c.beta = 2.0;
  const SimRecord r = simulate(c, 9);
  CHECK(r.G()(c.horizon) == 0.0);
  for (const auto& cu : r.customers) CHECK(std::isinf(cu.patience));
}

TEST_CASE("same config and seed give identical records; other seeds differ") {
  const SystemConfig c = assorted_configs()[1];
  const SimRecord a = simulate(c, 99, 2), b = simulate(c, 99, 2), d = simulate(c, 99, 3);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    REQUIRE(a.events[i].time == b.events[i].time);
    REQUIRE(a.events[i].kind == b.events[i].kind);
    REQUIRE(a.events[i].customer == b.events[i].customer);
  }
  CHECK((d.events.size() != a.events.size() || d.events[0].time != a.events[0].time));
}

TEST_CASE("binary trace round-trip reproduces the record") {
  const SystemConfig c = assorted_configs()[3];
  const SimRecord a = simulate(c, 12);
  std::stringstream ss;
  a.write_trace(ss);
  const SimRecord b = SimRecord::read_trace(ss, c);
  REQUIRE(a.events.size() == b.events.size());
  REQUIRE(a.customers.size() == b.customers.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) REQUIRE(a.events[i].time == b.events[i].time);
  for (std::size_t i = 0; i < a.customers.size(); ++i) {
    REQUIRE(a.customers[i].id == b.customers[i].id);
    REQUIRE(a.customers[i].outcome == b.customers[i].outcome);
    REQUIRE((a.customers[i].service == b.customers[i].service ||
             (std::isnan(a.customers[i].service) && std::isnan(b.customers[i].service))));
  }
  CHECK(a.seed == b.seed);
  CHECK(a.initial_count == b.initial_count);
  std::ostringstream e1, e2;
  a.write_events_csv(e1);
  b.write_events_csv(e2);
  CHECK(e1.str() == e2.str());
}

TEST_CASE("D/D/1 with service 0.6: every offered wait is 0") {
  const SimRecord r = simulate(dd1(0.6, 20.0), 1);
  const auto w = offered_waits(r);
  REQUIRE(w.size() == 20);
  for (const auto& x : w) CHECK(x.wait == 0.0);
}

TEST_CASE("D/D/1 with service 1.4: offered waits follow the Lindley recursion") {
  const SimRecord r = simulate(dd1(1.4, 20.0), 1);
  const auto w = offered_waits(r);
  double lindley = 0.0;
  int checked = 0;
  for (const auto& x : w) {
    if (x.truncated) break;
    CHECK(x.wait == doctest::Approx(lindley).epsilon(1e-12));
    CHECK(x.wait == doctest::Approx(0.4 * static_cast<double>(x.id - 1)).epsilon(1e-12));
    lindley = std::max(0.0, lindley + 1.4 - 1.0);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("virtual wait: free server gives 0, one customer ahead with 1.7 left gives 1.7") {
  // service 2, first arrival at t = 1 starts service until t = 3
  const SimRecord r = simulate(dd1(2.0, 10.0), 1);
  const WaitValue at_half = virtual_wait(r, 0.5);
  CHECK_FALSE(at_half.truncated);
  CHECK(at_half.value == 0.0);
  const WaitValue w = virtual_wait(r, 1.3);
  CHECK_FALSE(w.truncated);
  CHECK(w.value == doctest::Approx(1.7));
}

TEST_CASE("virtual wait past what the horizon determines is flagged") {
  const SimRecord r = simulate(dd1(1.4, 5.0), 1);
  const WaitValue w = virtual_wait(r, 4.9);
  CHECK(w.truncated);
}

TEST_CASE("M/M/1 long run: mu times mean virtual wait matches mean number in system within 5%") {
  // a virtual arrival waits for everyone present, so mu E[omega] = E[X]
  SystemConfig c;
  c.n = 1;
  c.alpha = 1.0;
  c.mu = 1.0;
  c.beta = -0.5;
  c.abandon = false;
  c.initial.head_count = 0;
  c.horizon = 20000.0;
  const SimRecord r = simulate(c, 31);
  std::vector<double> ts;
  for (double t = 10.0; t < c.horizon - 200.0; t += 0.5) ts.push_back(t);
  const auto w = virtual_waits(r, ts);
  const auto x = r.X().sample(ts);
  double sw = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    REQUIRE_FALSE(w[i].truncated);
    sw += w[i].value;
    sx += x[i];
  }
  CHECK(std::abs(c.mu * sw / sx - 1.0) <= 0.05);
}

TEST_CASE("invalid configurations are rejected") {
  SystemConfig c;
  c.alpha = 0.5;
  c.service = DistributionSpec::erlang(2, 2.0);
  CHECK_THROWS_AS(simulate(c, 1), std::invalid_argument);
  SystemConfig d;
  d.service = DistributionSpec::exponential(2.0);  // mean must be 1/mu
  CHECK_THROWS_AS(simulate(d, 1), std::invalid_argument);
  SystemConfig e;
  e.horizon = 0.0;
  CHECK_THROWS_AS(simulate(e, 1), std::invalid_argument);
}

}
