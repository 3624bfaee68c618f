#include "httq/event_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "httq/renewal.hpp"

namespace httq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTie = 1e-12;

// lower value = handled first inside a tie batch
enum class Pending : std::uint8_t { service_end = 0, arrival = 1, patience = 2 };

struct Scheduled {
  double time;
  Pending kind;
  std::uint64_t seq;
  long customer;
};

struct Later {
  bool operator()(const Scheduled& a, const Scheduled& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

class Simulator {
 public:
  Simulator(const SystemConfig& cfg, std::uint64_t seed, std::uint64_t rep)
      : cfg_(cfg),
        streams_(seed, rep),
        interarrival_(cfg.arrival.interarrival(cfg.arrival_rate())),
        service_(cfg.service_law()),
        patience_(cfg.patience.at(cfg.n)) {
    rec_.config = cfg;
    rec_.seed = seed;
    rec_.replication = rep;
    rec_.servers = cfg.servers();
    rec_.horizon = cfg.horizon;
  }

  SimRecord run() {
    init();
    const double T = cfg_.horizon;
    std::vector<Scheduled> batch;
    while (!heap_.empty() && heap_.top().time <= T) {
      const double t0 = heap_.top().time;
      batch.clear();
      while (!heap_.empty() && heap_.top().time <= t0 + kTie) {
        batch.push_back(heap_.top());
        heap_.pop();
      }
      std::sort(batch.begin(), batch.end(), [](const Scheduled& a, const Scheduled& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.seq < b.seq;
      });
      for (const auto& e : batch) handle(e, t0);
    }
    for (auto& c : rec_.customers) {
      if (c.outcome == Outcome::in_service || c.outcome == Outcome::waiting) c.exit = kNaN;
    }
    return std::move(rec_);
  }

 private:
  void init() {
    const long N = rec_.servers;
    long x0;
    if (cfg_.initial.head_count) {
      x0 = *cfg_.initial.head_count;
    } else {
      const double xi = cfg_.initial.xi_law ? cfg_.initial.xi_law->sample(streams_.initial) : cfg_.initial.xi;
      x0 = N + static_cast<long>(std::ceil(std::sqrt(cfg_.n) * xi - 1e-9));
    }
    if (x0 < 0) throw std::invalid_argument("initial head count is negative");
    const long in_service = std::min(x0, N);
    const long queued = x0 - in_service;
    rec_.initial_count = x0;
    rec_.initial_queue = queued;
    x_ = x0;
    busy_ = in_service;

    std::optional<EquilibriumDistribution> residual;
    if (cfg_.alpha >= 1.0) residual.emplace(cfg_.service);
    const DistributionSpec remaining_exp = DistributionSpec::exponential(cfg_.service_rate());

    rec_.customers.reserve(static_cast<std::size_t>(x0 + 1.5 * cfg_.arrival_rate() * cfg_.horizon + 16));
    for (long i = 0; i < in_service; ++i) {
      const long id = -x0 + 1 + i;
      const double v = residual ? residual->sample(streams_.initial) : remaining_exp.sample(streams_.initial);
      rec_.customers.push_back({id, 0.0, kInf, v, 0.0, kNaN, Outcome::in_service, true});
      push(v, Pending::service_end, id);
    }
    for (long i = 0; i < queued; ++i) {
      const long id = -queued + 1 + i;
      rec_.customers.push_back({id, 0.0, kInf, kNaN, kNaN, kNaN, Outcome::waiting, true});
      requirement_[id] = service_.sample(streams_.services);
      queue_.push_back(id);
      ++waiting_;
    }
    const double first = interarrival_.sample(streams_.arrivals);
    if (first <= cfg_.horizon) push(first, Pending::arrival, 0);
  }

  CustomerRecord& cust(long id) { return rec_.customers[static_cast<std::size_t>(id + rec_.initial_count - 1)]; }

  void push(double t, Pending k, long id) { heap_.push({t, k, seq_++, id}); }

  void log(double t, EventKind k, long id) { rec_.events.push_back({t, k, id}); }

  [[noreturn]] void corrupt(const std::string& what, const Scheduled& e) {
    std::ostringstream os;
    os << "event queue corruption: " << what << " (customer " << e.customer << " at t=" << e.time << ")\n";
    const std::size_t from = rec_.events.size() > 20 ? rec_.events.size() - 20 : 0;
    for (std::size_t i = from; i < rec_.events.size(); ++i)
      os << "  " << rec_.events[i].time << ' ' << to_string(rec_.events[i].kind) << ' ' << rec_.events[i].customer << '\n';
    throw std::logic_error(os.str());
  }

  void start_service(long id, double t) {
    CustomerRecord& c = cust(id);
    const double v = requirement_.at(id);
    requirement_.erase(id);
    c.service = v;
    c.service_start = t;
    c.outcome = Outcome::in_service;
    ++busy_;
    --waiting_;
    log(t, EventKind::service_start, id);
    push(t + v, Pending::service_end, id);
  }

  void fill_servers(double t) {
    while (busy_ < rec_.servers && waiting_ > 0) {
      const long id = queue_.front();
      queue_.pop_front();
      if (cust(id).outcome != Outcome::waiting) continue;  // abandoned earlier
      start_service(id, t);
    }
  }

  void handle(const Scheduled& e, double t) {
    switch (e.kind) {
      case Pending::service_end: {
        CustomerRecord& c = cust(e.customer);
        if (c.outcome != Outcome::in_service) corrupt("service end for a customer not in service", e);
        c.outcome = Outcome::completed;
        c.exit = t;
        --busy_;
        --x_;
        log(t, EventKind::service_end, e.customer);
        fill_servers(t);
        break;
      }
      case Pending::arrival: {
        const long id = next_id_++;
        const double gamma = patience_.sample(streams_.patience);
        // the requirement travels with the customer, so abandonment never
        // reshuffles service times among the others (keeps Q <= Q_0 pathwise)
        requirement_[id] = service_.sample(streams_.services);
        rec_.customers.push_back({id, e.time, cfg_.abandon ? gamma : kInf, kNaN, kNaN, kNaN, Outcome::waiting, false});
        ++x_;
        ++waiting_;
        log(t, EventKind::arrival, id);
        queue_.push_back(id);
        fill_servers(t);
        if (cfg_.abandon && cust(id).outcome == Outcome::waiting && std::isfinite(gamma))
          push(e.time + gamma, Pending::patience, id);
        const double next = e.time + interarrival_.sample(streams_.arrivals);
        if (next <= cfg_.horizon) push(next, Pending::arrival, 0);
        break;
      }
      case Pending::patience: {
        CustomerRecord& c = cust(e.customer);
        if (c.outcome == Outcome::abandoned) corrupt("second patience expiry for an abandoned customer", e);
        if (c.outcome != Outcome::waiting) break;  // entered service in time
        c.outcome = Outcome::abandoned;
        c.exit = t;
        requirement_.erase(e.customer);
        --waiting_;
        --x_;
        log(t, EventKind::abandonment, e.customer);
        break;
      }
    }
  }

  const SystemConfig& cfg_;
  StreamSet streams_;
  DistributionSpec interarrival_;
  DistributionSpec service_;
  PatienceLaw patience_;
  SimRecord rec_;
  std::priority_queue<Scheduled, std::vector<Scheduled>, Later> heap_;
  std::deque<long> queue_;
  std::unordered_map<long, double> requirement_;  // drawn on arrival, used on service entry
  std::uint64_t seq_ = 0;
  long next_id_ = 1;
  long x_ = 0, busy_ = 0, waiting_ = 0;
};

// Step path of a running count driven by the event log.
template <class Delta>
CadlagPath count_path(const SimRecord& r, double initial, Delta delta) {
  StepPathBuilder b(initial);
  double v = initial;
  for (const auto& e : r.events) {
    const double d = delta(e);
    if (d == 0.0) continue;
    v += d;
    b.set(e.time, v);
  }
  return b.finish(r.horizon);
}

}  // namespace

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::arrival: return "arrival";
    case EventKind::service_start: return "service_start";
    case EventKind::service_end: return "service_end";
    case EventKind::abandonment: return "abandonment";
  }
  return "unknown";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::completed: return "completed";
    case Outcome::in_service: return "in_service";
    case Outcome::abandoned: return "abandoned";
    case Outcome::waiting: return "waiting";
  }
  return "unknown";
}

SimRecord simulate(const SystemConfig& config, std::uint64_t seed, std::uint64_t replication) {
  config.validate();
  return Simulator(config, seed, replication).run();
}

long SimRecord::abandonments() const {
  return static_cast<long>(std::count_if(customers.begin(), customers.end(),
                                         [](const CustomerRecord& c) { return c.outcome == Outcome::abandoned; }));
}

CadlagPath SimRecord::E() const {
  return count_path(*this, 0.0, [](const EventRecord& e) { return e.kind == EventKind::arrival ? 1.0 : 0.0; });
}

CadlagPath SimRecord::S() const {
  return count_path(*this, 0.0, [](const EventRecord& e) { return e.kind == EventKind::service_end ? 1.0 : 0.0; });
}

CadlagPath SimRecord::G() const {
  return count_path(*this, 0.0, [](const EventRecord& e) { return e.kind == EventKind::abandonment ? 1.0 : 0.0; });
}

CadlagPath SimRecord::K() const {
  return count_path(*this, 0.0, [](const EventRecord& e) { return e.kind == EventKind::service_start ? 1.0 : 0.0; });
}

CadlagPath SimRecord::X() const {
  return count_path(*this, static_cast<double>(initial_count), [](const EventRecord& e) {
    switch (e.kind) {
      case EventKind::arrival: return 1.0;
      case EventKind::service_end:
      case EventKind::abandonment: return -1.0;
      default: return 0.0;
    }
  });
}

CadlagPath SimRecord::Q() const {
  const double N = static_cast<double>(servers);
  return X().compose([N](double x) { return std::max(x - N, 0.0); });
}

CadlagPath SimRecord::busy() const {
  const double N = static_cast<double>(servers);
  return X().compose([N](double x) { return std::min(x, N); });
}

void SimRecord::write_events_csv(std::ostream& os) const {
  os.precision(17);
  os << "time,kind,customer\n";
  for (const auto& e : events) os << e.time << ',' << to_string(e.kind) << ',' << e.customer << '\n';
}

namespace {
constexpr char kMagic[8] = {'H', 'T', 'T', 'Q', 'T', 'R', 'C', '1'};

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::runtime_error("truncated trace");
  return v;
}
}  // namespace

void SimRecord::write_trace(std::ostream& os) const {
  os.write(kMagic, sizeof kMagic);
  put(os, config.hash());
  put(os, seed);
  put(os, replication);
  put<std::int64_t>(os, servers);
  put<std::int64_t>(os, initial_count);
  put<std::int64_t>(os, initial_queue);
  put(os, horizon);
  put<std::uint64_t>(os, events.size());
  for (const auto& e : events) {
    put(os, e.time);
    put(os, static_cast<std::uint8_t>(e.kind));
    put<std::int64_t>(os, e.customer);
  }
  put<std::uint64_t>(os, customers.size());
  for (const auto& c : customers) {
    put<std::int64_t>(os, c.id);
    put(os, c.arrival);
    put(os, c.patience);
    put(os, c.service);
    put(os, c.service_start);
    put(os, c.exit);
    put(os, static_cast<std::uint8_t>(c.outcome));
    put(os, static_cast<std::uint8_t>(c.initial));
  }
}

SimRecord SimRecord::read_trace(std::istream& is, const SystemConfig& config) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || !std::equal(magic, magic + 8, kMagic)) throw std::runtime_error("not a trace file");
  SimRecord r;
  r.config = config;
  if (get<std::uint64_t>(is) != config.hash()) throw std::runtime_error("trace was written for a different config");
  r.seed = get<std::uint64_t>(is);
  r.replication = get<std::uint64_t>(is);
  r.servers = static_cast<long>(get<std::int64_t>(is));
  r.initial_count = static_cast<long>(get<std::int64_t>(is));
  r.initial_queue = static_cast<long>(get<std::int64_t>(is));
  r.horizon = get<double>(is);
  r.events.resize(get<std::uint64_t>(is));
  for (auto& e : r.events) {
    e.time = get<double>(is);
    e.kind = static_cast<EventKind>(get<std::uint8_t>(is));
    e.customer = static_cast<long>(get<std::int64_t>(is));
  }
  r.customers.resize(get<std::uint64_t>(is));
  for (auto& c : r.customers) {
    c.id = static_cast<long>(get<std::int64_t>(is));
    c.arrival = get<double>(is);
    c.patience = get<double>(is);
    c.service = get<double>(is);
    c.service_start = get<double>(is);
    c.exit = get<double>(is);
    c.outcome = static_cast<Outcome>(get<std::uint8_t>(is));
    c.initial = get<std::uint8_t>(is) != 0;
  }
  return r;
}

// ---- FCFS replay ---------------------------------------------------------

namespace {

class Replay {
 public:
  explicit Replay(const SimRecord& r) : r_(r) {
    std::vector<double> free(static_cast<std::size_t>(r.servers), 0.0);
    const long in_service = r.initial_count - r.initial_queue;
    for (long i = 0; i < in_service; ++i) {
      const CustomerRecord& c = r.customers[static_cast<std::size_t>(i)];
      free[static_cast<std::size_t>(i)] = c.service;
    }
    heap_ = std::priority_queue<double, std::vector<double>, std::greater<>>(std::greater<>(), std::move(free));
    next_ = static_cast<std::size_t>(in_service);
  }

  bool done() const { return next_ >= r_.customers.size(); }
  double next_arrival() const { return r_.customers[next_].arrival; }
  bool truncated() const { return truncated_; }
  double earliest_free() const { return heap_.empty() ? 0.0 : heap_.top(); }

  /// Processes the next customer; returns its entry epoch (which may exceed
  /// the horizon) and whether it would be served.
  OfferedWait step(double* entry = nullptr) {
    const CustomerRecord& c = r_.customers[next_++];
    const bool was_truncated = truncated_;
    const double e = std::max(c.arrival, earliest_free());
    const bool served = e <= c.arrival + c.patience + kTie;
    if (entry) *entry = e;
    if (served && !truncated_) {
      heap_.pop();
      if (std::isnan(c.service)) {
        truncated_ = true;  // entry after the horizon: its service time was never drawn
      } else {
        heap_.push(e + c.service);
      }
    }
    return {c.id, c.arrival, e - c.arrival, served, was_truncated};
  }

 private:
  const SimRecord& r_;
  std::priority_queue<double, std::vector<double>, std::greater<>> heap_;
  std::size_t next_ = 0;
  bool truncated_ = false;
};

}  // namespace

std::vector<OfferedWait> offered_waits(const SimRecord& record) {
  Replay rp(record);
  std::vector<OfferedWait> out;
  out.reserve(record.customers.size());
  while (!rp.done()) out.push_back(rp.step());
  return out;
}

std::vector<WaitValue> virtual_waits(const SimRecord& record, const std::vector<double>& times) {
  Replay rp(record);
  std::vector<WaitValue> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (i > 0 && t < times[i - 1]) throw std::invalid_argument("virtual wait times must be ascending");
    if (t < 0.0 || t > record.horizon) throw std::out_of_range("virtual wait time outside [0, horizon]");
    while (!rp.done() && rp.next_arrival() <= t) rp.step();
    if (rp.truncated())
      out.push_back({kNaN, true});
    else
      out.push_back({std::max(0.0, rp.earliest_free() - t), false});
  }
  return out;
}

WaitValue virtual_wait(const SimRecord& record, double t) { return virtual_waits(record, {t}).front(); }

double replay_discrepancy(const SimRecord& record) {
  Replay rp(record);
  double worst = 0.0;
  const long in_service = record.initial_count - record.initial_queue;
  for (std::size_t i = static_cast<std::size_t>(in_service); i < record.customers.size(); ++i) {
    const CustomerRecord& c = record.customers[i];
    double e = 0.0;
    const OfferedWait w = rp.step(&e);
    if (w.truncated) break;
    if (!std::isnan(c.service_start)) {
      worst = std::max(worst, std::abs(e - c.service_start));
      if (!w.served) worst = std::max(worst, kInf);
    } else if (w.served && e <= record.horizon - kTie) {
      worst = kInf;  // replay serves a customer the simulator did not
    }
  }
  return worst;
}

}  // namespace httq
