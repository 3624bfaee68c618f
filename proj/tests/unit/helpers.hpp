#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "httq/event_sim.hpp"

namespace testing {

// sup_x |F_emp(x) - F(x)| with both one-sided gaps at each order statistic.
template <class Cdf>
double one_sample_ks(std::vector<double> xs, const Cdf& cdf) {
  std::sort(xs.begin(), xs.end());
  const double m = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / m - F), std::abs(F - static_cast<double>(i) / m)});
  }
  return d;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// A hand-built record: n = 4 (N = 4 servers), six customers at time 0, four in
// service for the whole horizon and two queued. Each time in `abandon_at`
// removes one queued customer by abandonment.
inline httq::SimRecord one_step_record(const std::vector<double>& abandon_at, double horizon = 3.0) {
  using namespace httq;
  SimRecord r;
  r.config.n = 4.0;
  r.config.alpha = 1.0;
  r.config.horizon = horizon;
  r.servers = 4;
  r.initial_count = 6;
  r.initial_queue = 2;
  r.horizon = horizon;
  const double nan = std::nan("");
  for (long id = -5; id <= -2; ++id)
    r.customers.push_back({id, 0.0, HUGE_VAL, 100.0, 0.0, nan, Outcome::in_service, true});
  for (long id = -1; id <= 0; ++id) r.customers.push_back({id, 0.0, HUGE_VAL, nan, nan, nan, Outcome::waiting, true});
  long who = -1;
  for (double t : abandon_at) {
    r.events.push_back({t, EventKind::abandonment, who});
    auto& c = r.customers[static_cast<std::size_t>(who + 5)];
    c.outcome = Outcome::abandoned;
    c.exit = t;
    ++who;
  }
  return r;
}

}  // namespace testing
