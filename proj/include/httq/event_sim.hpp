#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "httq/cadlag_path.hpp"
#include "httq/random_stream.hpp"
#include "httq/system_config.hpp"

namespace httq {

enum class EventKind : std::uint8_t { arrival, service_start, service_end, abandonment };
std::string_view to_string(EventKind k);

struct EventRecord {
  double time;
  EventKind kind;
  long customer;
};

enum class Outcome : std::uint8_t { completed, in_service, abandoned, waiting };
std::string_view to_string(Outcome o);

/// Ids: initial in-service customers -X0+1 .. -Q0, initial queue -Q0+1 .. 0,
/// arrivals 1, 2, ... in arrival order. Initial customers carry arrival 0.
/// `service` and `service_start` are NaN for customers who never started
/// service before the horizon; `exit` is NaN while still present.
struct CustomerRecord {
  long id;
  double arrival;
  double patience;
  double service;
  double service_start;
  double exit;
  Outcome outcome;
  bool initial;
};

struct SimRecord {
  SystemConfig config;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  long servers = 0;
  long initial_count = 0;
  long initial_queue = 0;
  double horizon = 0.0;
  std::vector<EventRecord> events;
  std::vector<CustomerRecord> customers;

  const CustomerRecord& customer(long id) const { return customers.at(static_cast<std::size_t>(id + initial_count - 1)); }
  long arrivals() const { return static_cast<long>(customers.size()) - initial_count; }
  long abandonments() const;
  std::string config_hash() const { return hex64(config.hash()); }

  /// Arrivals E, service completions S, abandonments G, service entries of
  /// non-initial customers K (initial queue included), head count X and
  /// queue length Q = (X - N)^+.
  CadlagPath E() const;
  CadlagPath S() const;
  CadlagPath G() const;
  CadlagPath K() const;
  CadlagPath X() const;
  CadlagPath Q() const;
  /// Number busy, min(X, N).
  CadlagPath busy() const;

  void write_events_csv(std::ostream& os) const;
  void write_trace(std::ostream& os) const;
  static SimRecord read_trace(std::istream& is, const SystemConfig& config);
};

/// Event-exact simulation on [0, horizon]. Events closer than 1e-12 are one
/// batch, handled in the order service-end, arrival, patience-expiry, so a
/// customer whose patience runs out at the instant a server frees is served.
SimRecord simulate(const SystemConfig& config, std::uint64_t seed, std::uint64_t replication = 0);

struct WaitValue {
  double value;
  bool truncated;
};

struct OfferedWait {
  long id;
  double arrival;
  double wait;
  bool served;
  bool truncated;
};

/// FCFS replay of the record: each customer's offered wait ignoring its own
/// abandonment but honoring the others'. Results past the first customer whose
/// service would start after the horizon are marked truncated.
std::vector<OfferedWait> offered_waits(const SimRecord& record);

/// Wait of a hypothetical infinitely patient arrival at each time (ascending),
/// behind every real arrival up to and including that time. It never takes a
/// server from anybody.
std::vector<WaitValue> virtual_waits(const SimRecord& record, const std::vector<double>& times);
WaitValue virtual_wait(const SimRecord& record, double t);

/// Max |replayed service entry - recorded service entry| over customers who
/// started service. Zero up to rounding for a consistent record.
double replay_discrepancy(const SimRecord& record);

}  // namespace httq
