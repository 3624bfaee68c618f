#include "httq/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <set>
#include <sstream>

#include "httq/event_sim.hpp"
#include "httq/limit_lab.hpp"
#include "httq/parallel.hpp"
#include "httq/regulator_maps.hpp"
#include "httq/renewal.hpp"
#include "httq/scaling.hpp"
#include "httq/validation.hpp"

namespace httq {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Collects unknown keys across the whole document so one error lists them all.
struct KeyAudit {
  std::vector<std::string> unknown;

  void check(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ValidationError(where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) unknown.push_back(where.empty() ? it.key() : where + "." + it.key());
    }
  }

  void raise() const {
    if (unknown.empty()) return;
    std::string msg = "unknown keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ValidationError(msg);
  }
};

double number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

std::string text(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ValidationError(std::string("key '") + key + "' must be a string");
  return v.get<std::string>();
}

std::uint64_t count(const json& obj, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ValidationError(std::string("key '") + key + "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::vector<double> numbers(const json& obj, const char* key) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  const json& v = obj.at(key);
  if (!v.is_array()) throw ValidationError(std::string("key '") + key + "' must be an array of numbers");
  for (const auto& x : v) {
    if (!x.is_number()) throw ValidationError(std::string("key '") + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> strings(const json& obj, const char* key, std::vector<std::string> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  std::vector<std::string> out;
  if (!v.is_array()) throw ValidationError(std::string("key '") + key + "' must be an array of strings");
  for (const auto& x : v) {
    if (!x.is_string()) throw ValidationError(std::string("key '") + key + "' must be an array of strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

DistributionSpec law(const json& obj, const char* key, const DistributionSpec& fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return DistributionSpec::parse(text(obj, key, ""));
  } catch (const ValidationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string(key) + ": " + e.what());
  }
}

ScalarFunction scalar_function(const json& j, const std::string& where, KeyAudit& audit) {
  audit.check(j, where, {"kind", "value", "slope", "coef", "exponent", "x", "y"});
  const std::string kind = text(j, "kind", "");
  if (kind == "constant") return ScalarFunction::constant(number(j, "value", 0.0));
  if (kind == "linear") return ScalarFunction::linear(number(j, "slope", 1.0));
  if (kind == "power") return ScalarFunction::power(number(j, "coef", 1.0), number(j, "exponent", 1.0));
  if (kind == "piecewise_linear") return ScalarFunction::piecewise_linear(numbers(j, "x"), numbers(j, "y"));
  throw ValidationError(where + ".kind must be constant, linear, power or piecewise_linear");
}

SystemConfig system_config(const json& j, KeyAudit& audit) {
  audit.check(j, "system",
              {"n", "alpha", "mu", "beta", "arrival", "service", "patience", "initial", "horizon", "abandon"});
  SystemConfig c;
  c.n = number(j, "n", c.n);
  c.alpha = number(j, "alpha", c.alpha);
  c.mu = number(j, "mu", c.mu);
  c.beta = number(j, "beta", c.beta);
  c.horizon = number(j, "horizon", c.horizon);
  if (j.contains("abandon")) {
    if (!j.at("abandon").is_boolean()) throw ValidationError("system.abandon must be true or false");
    c.abandon = j.at("abandon").get<bool>();
  }
  c.arrival = ArrivalSpec(law(j, "arrival", DistributionSpec::exponential(1.0)));
  c.service = law(j, "service", DistributionSpec::exponential(c.mu));
  if (j.contains("patience")) {
    const json& p = j.at("patience");
    audit.check(p, "system.patience", {"mode", "law", "h", "f"});
    const std::string mode = text(p, "mode", "no_scaling");
    if (mode == "no_scaling") {
      c.patience = PatienceSpec::no_scaling(law(p, "law", DistributionSpec::exponential(1.0)));
    } else if (mode == "hazard_rate") {
      if (!p.contains("h")) throw ValidationError("system.patience.h is required for hazard_rate");
      c.patience = PatienceSpec::hazard_rate(scalar_function(p.at("h"), "system.patience.h", audit));
    } else if (mode == "direct_f") {
      if (!p.contains("f")) throw ValidationError("system.patience.f is required for direct_f");
      c.patience = PatienceSpec::direct_f(scalar_function(p.at("f"), "system.patience.f", audit));
    } else {
      throw ValidationError("system.patience.mode must be no_scaling, hazard_rate or direct_f");
    }
  }
  if (j.contains("initial")) {
    const json& i = j.at("initial");
    audit.check(i, "system.initial", {"xi", "xi_law", "head_count"});
    c.initial.xi = number(i, "xi", 0.0);
    if (i.contains("xi_law")) c.initial.xi_law = law(i, "xi_law", DistributionSpec::exponential(1.0));
    if (i.contains("head_count")) c.initial.head_count = static_cast<long>(count(i, "head_count", 0));
  }
  return c;
}

ExperimentSpec parse_document(const json& doc) {
  KeyAudit audit;
  audit.check(doc, "", {"command", "system", "seed", "replications", "ns", "checkpoints", "limit_samples", "grid_step",
                        "output", "thresholds", "renewal", "compare", "maps"});
  ExperimentSpec s;
  s.document = doc;
  s.command = text(doc, "command", "");
  static const std::set<std::string> commands{"simulate", "limit", "renewal", "sweep", "compare", "maps"};
  if (!commands.count(s.command))
    throw ValidationError("command must be one of simulate, limit, renewal, sweep, compare, maps");
  if (doc.contains("system")) s.system = system_config(doc.at("system"), audit);
  s.seed = count(doc, "seed", 1);
  s.replications = count(doc, "replications", s.command == "sweep" ? 200 : 1);
  s.ns = numbers(doc, "ns");
  s.checkpoints = numbers(doc, "checkpoints");
  s.limit_samples = count(doc, "limit_samples", 0);
  if (doc.contains("grid_step")) s.grid_step = number(doc, "grid_step", 0.0);
  s.output = text(doc, "output", s.output);
  if (doc.contains("thresholds")) {
    const json& t = doc.at("thresholds");
    audit.check(t, "thresholds", {"strictly_decreasing", "decreasing", "max_ratio", "ks_max"});
    s.thresholds.strictly_decreasing = strings(t, "strictly_decreasing", s.thresholds.strictly_decreasing);
    s.thresholds.decreasing = strings(t, "decreasing", {});
    if (t.contains("max_ratio")) {
      const json& r = t.at("max_ratio");
      if (!r.is_object()) throw ValidationError("thresholds.max_ratio must map statistic names to numbers");
      for (auto it = r.begin(); it != r.end(); ++it) s.thresholds.max_ratio.emplace_back(it.key(), number(r, it.key().c_str(), 0.0));
    }
    if (t.contains("ks_max")) s.thresholds.ks_max = number(t, "ks_max", 0.0);
  }
  if (doc.contains("renewal")) {
    const json& r = doc.at("renewal");
    audit.check(r, "renewal", {"service", "horizon"});
    s.renewal_service = law(r, "service", s.renewal_service);
    s.renewal_horizon = number(r, "horizon", s.renewal_horizon);
  }
  if (doc.contains("compare")) {
    const json& c = doc.at("compare");
    audit.check(c, "compare", {"random_configs"});
    s.random_configs = count(c, "random_configs", 0);
  }
  if (doc.contains("maps")) {
    const json& m = doc.at("maps");
    audit.check(m, "maps", {"map", "xi", "drift", "noise_rate", "horizon", "mu", "mu_n", "service", "f"});
    MapInputs& in = s.maps;
    in.map = text(m, "map", in.map);
    in.xi = number(m, "xi", in.xi);
    in.drift = number(m, "drift", in.drift);
    in.noise_rate = number(m, "noise_rate", in.noise_rate);
    in.horizon = number(m, "horizon", in.horizon);
    in.mu = number(m, "mu", in.mu);
    in.mu_n = number(m, "mu_n", in.mu_n);
    in.service = law(m, "service", DistributionSpec::exponential(in.mu));
    if (m.contains("f")) in.f = scalar_function(m.at("f"), "maps.f", audit);
  }
  audit.raise();

  if (s.grid_step && !(*s.grid_step > 0.0)) throw ValidationError("grid_step must be positive");
  if (s.command != "renewal" && s.command != "maps") {
    try {
      s.system.validate();
    } catch (const std::invalid_argument& e) {
      throw ValidationError(std::string("system: ") + e.what());
    }
  }
  if (s.command == "sweep" && s.ns.empty()) throw ValidationError("sweep needs a nonempty ns list");
  for (double n : s.ns)
    if (!(n >= 1.0)) throw ValidationError("every entry of ns must be at least 1");
  if (s.replications == 0) throw ValidationError("replications must be positive");
  if (s.command == "renewal" && !(s.renewal_horizon > 0.0)) throw ValidationError("renewal.horizon must be positive");
  if (s.command == "maps") {
    static const std::set<std::string> maps{"skorokhod_g", "phi_n_g", "phi_M", "phi_Mg"};
    if (!maps.count(s.maps.map)) throw ValidationError("maps.map must be skorokhod_g, phi_n_g, phi_M or phi_Mg");
    if (!(s.maps.horizon > 0.0) || !(s.maps.mu > 0.0) || !(s.maps.noise_rate >= 0.0))
      throw ValidationError("maps needs positive horizon and mu and a nonnegative noise_rate");
  }
  return s;
}

// ---------------------------------------------------------------------------

class Artifacts {
 public:
  Artifacts(fs::path dir, const ExperimentSpec& spec) : dir_(std::move(dir)) {
    meta_ = {{"spec_hash", spec.hash()}, {"seed", spec.seed}, {"version", kVersion}};
    std::ostringstream line;
    line << "# spec_hash=" << spec.hash() << ",seed=" << spec.seed << ",version=" << kVersion;
    header_ = line.str();
    schema_ = json::object();
  }

  using Columns = std::vector<std::pair<std::string, std::string>>;

  std::ofstream& csv(const std::string& name, const std::string& description, const Columns& columns) {
    out_.reset();
    out_ = std::make_unique<std::ofstream>(dir_ / name, std::ios::trunc);
    if (!*out_) throw std::runtime_error("cannot write " + (dir_ / name).string());
    *out_ << std::setprecision(17) << header_ << '\n';
    json cols = json::array();
    for (std::size_t i = 0; i < columns.size(); ++i) {
      *out_ << (i ? "," : "") << columns[i].first;
      cols.push_back({{"name", columns[i].first}, {"description", columns[i].second}});
    }
    *out_ << '\n';
    schema_[name] = {{"format", "csv"}, {"description", description}, {"columns", cols}};
    files_.push_back(name);
    return *out_;
  }

  void json_file(const std::string& name, const std::string& description, json body) {
    out_.reset();
    body["meta"] = meta_;
    std::ofstream os(dir_ / name, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
    os << body.dump(2) << '\n';
    schema_[name] = {{"format", "json"}, {"description", description}};
    files_.push_back(name);
  }

  std::vector<std::string> finish(const json& document) {
    json_file("spec.json", "the experiment document with command-line overrides applied", {{"spec", document}});
    schema_["schema.json"] = {{"format", "json"}, {"description", "this file"}};
    json body = {{"files", schema_}, {"meta", meta_},
                 {"csv_header", "every CSV starts with one '#' line carrying spec_hash, seed and version"}};
    std::ofstream os(dir_ / "schema.json", std::ios::trunc);
    os << body.dump(2) << '\n';
    files_.push_back("schema.json");
    return files_;
  }

 private:
  fs::path dir_;
  json meta_;
  std::string header_;
  json schema_;
  std::unique_ptr<std::ofstream> out_;
  std::vector<std::string> files_;
};

std::vector<double> default_checkpoints(const std::vector<double>& given, double T) {
  return given.empty() ? std::vector<double>{T / 4.0, T / 2.0, T} : given;
}

// --- simulate --------------------------------------------------------------

void run_simulate(const ExperimentSpec& s, const RunOptions& o, Artifacts& art) {
  const SystemConfig& cfg = s.system;
  const double step = s.grid_step.value_or(cfg.horizon / 200.0);
  const ScalarFunction f = cfg.abandon ? cfg.patience.limit_f() : ScalarFunction::constant(0.0);
  const UniformGrid grid = UniformGrid::covering(cfg.horizon, step);
  struct Rep {
    std::vector<EventRecord> events;
    std::vector<std::vector<double>> columns;
    long arrivals = 0, abandonments = 0, initial = 0;
    double coupling = 0, little = 0, negsup = 0, replay = 0;
    std::size_t truncated = 0;
  };
  const auto reps = parallel_map(s.replications, o.workers, [&](std::size_t r) {
    SimRecord rec = simulate(cfg, s.seed, r);
    const ScaledBundle b = scale(rec, f, grid.step);
    Rep out;
    out.arrivals = rec.arrivals();
    out.abandonments = rec.abandonments();
    out.initial = rec.initial_count;
    out.coupling = coupling_gap(b, r).value;
    const GapStatistic lg = little_gap(b, r);
    out.little = lg.value;
    out.truncated = lg.excluded;
    out.negsup = neg_part_sup(b, r).value;
    out.replay = replay_discrepancy(rec);
    const auto ts = b.omega_grid.times();
    out.columns = {ts, b.X.sample(ts), b.Q.sample(ts), b.G.sample(ts), b.G_hat.sample(ts), b.E.sample(ts),
                   b.S_raw.sample(ts), b.omega};
    out.events = std::move(rec.events);
    return out;
  });

  for (std::size_t r = 0; r < reps.size(); ++r) {
    auto& ev = art.csv("events_r" + std::to_string(r) + ".csv", "event log of replication " + std::to_string(r),
                       {{"time", "event time"},
                        {"kind", "arrival, service_start, service_end or abandonment"},
                        {"customer", "customer id; initial customers have ids <= 0"}});
    for (const auto& e : reps[r].events) ev << e.time << ',' << to_string(e.kind) << ',' << e.customer << '\n';
    auto& sc = art.csv("scaled_r" + std::to_string(r) + ".csv", "diffusion-scaled paths on the output grid",
                       {{"t", "time"},
                        {"X", "(X - N) / sqrt(n)"},
                        {"Q", "positive part of X"},
                        {"G", "abandonments / sqrt(n)"},
                        {"G_hat", "G minus its compensator mu int f(Q/mu)"},
                        {"E", "(E - lambda t) / sqrt(n)"},
                        {"S", "(S - mu^n int min(X, N)) / sqrt(n)"},
                        {"omega", "sqrt(n) times virtual wait; nan when undetermined by the horizon"}});
    const auto& c = reps[r].columns;
    for (std::size_t k = 0; k < c[0].size(); ++k) {
      for (std::size_t j = 0; j < c.size(); ++j) sc << (j ? "," : "") << c[j][k];
      sc << '\n';
    }
  }
  auto& sum = art.csv("summary.csv", "per-replication statistics",
                      {{"replication", "replication index"},
                       {"initial", "initial head count"},
                       {"arrivals", "arrivals in [0, T]"},
                       {"abandonments", "abandonments in [0, T]"},
                       {"coupling_gap", "sup |G_hat|"},
                       {"little_gap", "max |mu omega - Q| on the grid"},
                       {"neg_part_sup", "sup of the negative part of X"},
                       {"replay_discrepancy", "max |offered wait - service start + arrival| over served customers"},
                       {"truncated", "grid points excluded from little_gap"}});
  json rows = json::array();
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const Rep& p = reps[r];
    sum << r << ',' << p.initial << ',' << p.arrivals << ',' << p.abandonments << ',' << p.coupling << ',' << p.little
        << ',' << p.negsup << ',' << p.replay << ',' << p.truncated << '\n';
    rows.push_back({{"replication", r}, {"coupling_gap", p.coupling}, {"little_gap", p.little},
                    {"neg_part_sup", p.negsup}, {"arrivals", p.arrivals}, {"abandonments", p.abandonments}});
  }
  art.json_file("summary.json", "run summary",
                {{"command", "simulate"}, {"config", cfg.fingerprint()}, {"servers", cfg.servers()},
                 {"replications", s.replications}, {"grid_step", grid.step}, {"rows", rows}});
}

// --- limit -------------------------------------------------------------------

void run_limit(const ExperimentSpec& s, const RunOptions& o, Artifacts& art) {
  const LimitModel model(s.system, s.grid_step.value_or(0.01));
  const UniformGrid& grid = model.grid();
  const std::size_t samples = s.limit_samples ? s.limit_samples : s.replications;
  std::vector<std::size_t> idx;
  std::vector<double> at;
  for (double t : default_checkpoints(s.checkpoints, s.system.horizon)) {
    const double k = std::clamp(std::round(t / grid.step), 0.0, static_cast<double>(grid.intervals));
    idx.push_back(static_cast<std::size_t>(k));
    at.push_back(grid.time(idx.back()));
  }
  struct One {
    std::vector<double> values;
    double residual = 0.0;
    int iterations = 0;
  };
  const auto sols = parallel_map(samples, o.workers, [&](std::size_t r) {
    const LimitSolution sol = model.solve(s.seed, r);
    One out;
    for (std::size_t k : idx) out.values.push_back(sol.X[k]);
    out.residual = sol.residual;
    out.iterations = sol.iterations;
    return out;
  });

  const NoiseSample ns = model.noises(s.seed, 0);
  const LimitSolution first = model.solve(model.initial_xi(s.seed, 0), ns);
  auto& path = art.csv("limit_path.csv", "limit sample 0 on the solver grid",
                       {{"t", "time"}, {"E", "arrival noise"}, {"S", "service noise"}, {"X", "solution"},
                        {"L", "regulator (reflected case; 0 otherwise)"}});
  for (std::size_t k = 0; k < grid.size(); ++k)
    path << grid.time(k) << ',' << ns.E[k] << ',' << ns.S[k] << ',' << first.X[k] << ','
         << (first.L.empty() ? 0.0 : first.L[k]) << '\n';

  Artifacts::Columns cols{{"sample", "limit sample index"}};
  for (double t : at) {
    std::ostringstream name;
    name << "X@" << t;
    cols.emplace_back(name.str(), "solution at this checkpoint");
  }
  auto& marg = art.csv("limit_marginals.csv", "limit solution at the checkpoints", cols);
  double worst = 0.0;
  int iters = 0;
  for (std::size_t r = 0; r < sols.size(); ++r) {
    marg << r;
    for (double v : sols[r].values) marg << ',' << v;
    marg << '\n';
    worst = std::max(worst, sols[r].residual);
    iters = std::max(iters, sols[r].iterations);
  }
  art.json_file("limit_summary.json", "limit solve summary",
                {{"command", "limit"},
                 {"case", model.renewal_case() ? "renewal_map" : "reflected"},
                 {"grid_step", grid.step},
                 {"samples", samples},
                 {"checkpoints", at},
                 {"service_noise", ns.covariance_source},
                 {"cholesky_jitter", model.sampler() ? model.sampler()->jitter() : 0.0},
                 {"max_residual", worst},
                 {"max_iterations", iters}});
}

// --- renewal -------------------------------------------------------------------

void run_renewal(const ExperimentSpec& s, Artifacts& art) {
  const RenewalTable M = compute_renewal_function(s.renewal_service, s.renewal_horizon, s.grid_step);
  auto& os = art.csv("renewal.csv", "renewal function on the solver grid",
                     {{"t", "time"}, {"M", "renewal function"}, {"mu_t", "mu t, the elementary renewal line"}});
  double dev = 0.0;
  for (std::size_t k = 0; k < M.grid().size(); ++k) {
    const double t = M.grid().time(k);
    os << t << ',' << M.values()[k] << ',' << M.mu() * t << '\n';
    dev = std::max(dev, std::abs(M.values()[k] - M.mu() * t));
  }
  art.json_file("renewal.json", "renewal solve summary",
                {{"command", "renewal"},
                 {"service", s.renewal_service.describe()},
                 {"mu", M.mu()},
                 {"step", M.step()},
                 {"requested_step", M.requested_step()},
                 {"grid_adjusted", M.grid_adjusted()},
                 {"exact_lattice", M.exact_lattice()},
                 {"residual", M.residual()},
                 {"sup_abs_M_minus_mu_t", dev}});
}

// --- sweep ---------------------------------------------------------------------

std::vector<std::string> check_thresholds(const Thresholds& th, const ConvergenceReport& rep) {
  std::vector<std::string> fail;
  auto find = [&](const std::string& name) -> const TrendVerdict* {
    for (const auto& t : rep.trends)
      if (t.statistic == name) return &t;
    fail.push_back("no statistic named " + name);
    return nullptr;
  };
  for (const auto& name : th.strictly_decreasing)
    if (const auto* t = find(name); t && !t->strictly_decreasing) fail.push_back(name + " is not strictly decreasing");
  for (const auto& name : th.decreasing)
    if (const auto* t = find(name); t && t->verdict != "decreasing") fail.push_back(name + " is " + t->verdict);
  for (const auto& [name, bound] : th.max_ratio)
    if (const auto* t = find(name); t && !(t->last <= bound * t->first)) {
      std::ostringstream os;
      os << name << " ratio " << t->last / t->first << " exceeds " << bound;
      fail.push_back(os.str());
    }
  if (th.ks_max && !rep.levels.empty())
    for (std::size_t c = 0; c < rep.levels.back().ks.size(); ++c)
      if (!(rep.levels.back().ks[c] <= *th.ks_max)) {
        std::ostringstream os;
        os << "KS at t=" << rep.checkpoints[c] << " is " << rep.levels.back().ks[c] << " > " << *th.ks_max;
        fail.push_back(os.str());
      }
  return fail;
}

std::vector<std::string> run_sweep(const ExperimentSpec& s, const RunOptions& o, Artifacts& art) {
  SweepSpec sw;
  sw.base = s.system;
  sw.ns = s.ns;
  sw.replications = s.replications;
  sw.checkpoints = s.checkpoints;
  sw.seed = s.seed;
  sw.limit_samples = s.limit_samples;
  sw.limit_step = s.grid_step.value_or(0.01);
  sw.workers = o.workers;
  const ConvergenceReport rep = convergence_sweep(sw);

  auto& lv = art.csv("sweep_levels.csv", "median and quartiles of each statistic per n",
                     {{"n", "system index"}, {"statistic", "statistic name"}, {"median", "median over replications"},
                      {"q25", "first quartile"}, {"q75", "third quartile"}, {"count", "replications"}});
  for (const auto& l : rep.levels)
    for (const auto& [name, st] : l.stats)
      lv << l.n << ',' << name << ',' << st.median << ',' << st.q25 << ',' << st.q75 << ',' << st.count << '\n';

  auto& vals = art.csv("sweep_values.csv", "per-replication statistics, one row per (n, statistic, replication)",
                       {{"n", "system index"},
                        {"statistic", "coupling_gap (sup |G_hat|), little_gap (max |mu omega - Q|) or neg_part_sup (sup X^-)"},
                        {"replication", "replication index"},
                        {"value", "statistic value"}});
  for (const auto& l : rep.levels)
    for (const auto& [name, v] : l.values)
      for (std::size_t r = 0; r < v.size(); ++r) vals << l.n << ',' << name << ',' << r << ',' << v[r] << '\n';

  auto& ks = art.csv("sweep_ks.csv", "two-sample KS distance between X(t) and limit samples",
                     {{"n", "system index"}, {"t", "checkpoint"}, {"ks", "KS distance"}});
  for (const auto& l : rep.levels)
    for (std::size_t c = 0; c < l.ks.size(); ++c) ks << l.n << ',' << rep.checkpoints[c] << ',' << l.ks[c] << '\n';

  auto& tr = art.csv("sweep_trends.csv", "trend verdict of each statistic across n",
                     {{"statistic", "statistic name (ks@t for KS distances)"},
                      {"verdict", "decreasing, flat or increasing (last vs first)"},
                      {"strictly_decreasing", "1 if every step decreases"},
                      {"first", "value at the smallest n"},
                      {"last", "value at the largest n"}});
  json trends = json::array();
  for (const auto& t : rep.trends) {
    tr << t.statistic << ',' << t.verdict << ',' << (t.strictly_decreasing ? 1 : 0) << ',' << t.first << ',' << t.last
       << '\n';
    trends.push_back({{"statistic", t.statistic}, {"verdict", t.verdict},
                      {"strictly_decreasing", t.strictly_decreasing}, {"first", t.first}, {"last", t.last}});
  }

  std::vector<std::string> failures;
  if (o.check) failures = check_thresholds(s.thresholds, rep);
  json levels = json::array();
  for (const auto& l : rep.levels) {
    json st = json::object();
    for (const auto& [name, v] : l.stats) st[name] = {{"median", v.median}, {"q25", v.q25}, {"q75", v.q75}};
    levels.push_back({{"n", l.n}, {"stats", st}, {"ks", l.ks}, {"truncated_points", l.truncated}});
  }
  art.json_file("report.json", "sweep report",
                {{"command", "sweep"},
                 {"config", s.system.fingerprint()},
                 {"ns", rep.ns},
                 {"replications", rep.replications},
                 {"limit_samples", rep.limit_samples},
                 {"checkpoints", rep.checkpoints},
                 {"levels", levels},
                 {"trends", trends},
                 {"checked", o.check},
                 {"failures", failures}});
  return failures;
}

// --- compare -------------------------------------------------------------------

std::vector<std::string> run_compare(const ExperimentSpec& s, const RunOptions& o, Artifacts& art) {
  const std::size_t configs = s.random_configs ? s.random_configs : 1;
  std::vector<SystemConfig> cfgs;
  for (std::size_t i = 0; i < configs; ++i)
    cfgs.push_back(s.random_configs ? random_comparison_config(s.seed, i) : s.system);
  const std::size_t total = configs * s.replications;
  const auto verdicts = parallel_map(total, o.workers, [&](std::size_t k) {
    return compare_abandonment(cfgs[k / s.replications], s.seed, k % s.replications);
  });
  auto& os = art.csv("compare.csv", "queue comparison with and without abandonment on common random numbers",
                     {{"config", "config index"},
                      {"replication", "replication index"},
                      {"holds", "1 if Q with abandonment <= Q without at every event time"},
                      {"checked", "event times checked"},
                      {"violation_time", "first violation time (nan if none)"},
                      {"fingerprint", "config fingerprint"}});
  std::vector<std::string> failures;
  for (std::size_t k = 0; k < total; ++k) {
    const auto& v = verdicts[k];
    os << k / s.replications << ',' << k % s.replications << ',' << (v.holds ? 1 : 0) << ',' << v.checked << ','
       << (v.holds ? std::nan("") : v.violation_time) << ",\"" << cfgs[k / s.replications].fingerprint() << "\"\n";
    if (!v.holds) failures.push_back(v.dump);
  }
  art.json_file("compare.json", "comparison summary",
                {{"command", "compare"}, {"pairs", total}, {"violations", failures.size()}, {"dumps", failures}});
  return o.check ? failures : std::vector<std::string>{};
}

// --- maps ----------------------------------------------------------------------

void run_maps(const ExperimentSpec& s, Artifacts& art) {
  const MapInputs& in = s.maps;
  const UniformGrid grid = UniformGrid::covering(in.horizon, s.grid_step.value_or(0.01));
  RandomStream noise(s.seed, {0, Purpose::gaussian, 0});
  std::vector<double> y = sample_brownian_values(in.noise_rate, grid, noise);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += in.xi + in.drift * grid.time(k);
  const FunctionTable g = in.f ? FunctionTable::abandonment_drift(*in.f, in.mu) : FunctionTable::zero();
  MappingSolution sol;
  if (in.map == "skorokhod_g") {
    sol = solve_skorokhod_g(y, grid, g);
  } else if (in.map == "phi_n_g") {
    sol = solve_phi_n_g(y, grid, g, in.mu_n);
  } else {
    const RenewalTable M = compute_renewal_function(in.service, in.horizon, grid.step);
    sol = in.map == "phi_M" ? solve_phi_M(y, grid, M) : solve_phi_Mg(y, grid, M, g);
  }
  auto& os = art.csv("maps.csv", "input path and map output on the solver grid",
                     {{"t", "time"}, {"y", "input path"}, {"x", "map output"}, {"ell", "regulator (0 if none)"}});
  for (std::size_t k = 0; k < grid.size(); ++k)
    os << grid.time(k) << ',' << y[k] << ',' << sol.x[k] << ',' << (sol.ell.empty() ? 0.0 : sol.ell[k]) << '\n';
  art.json_file("maps.json", "map solve summary",
                {{"command", "maps"},
                 {"map", sol.variant},
                 {"grid_step", grid.step},
                 {"residual", sol.residual},
                 {"complementarity", sol.complementarity},
                 {"iterations", sol.iterations},
                 {"decay_ratio", sol.decay_ratio},
                 {"window", sol.window},
                 {"lambda_M", sol.lambda_M},
                 {"lambda_g", sol.lambda_g}});
}

}  // namespace

ScalarFunction parse_scalar_function(const json& j) {
  KeyAudit audit;
  ScalarFunction f = scalar_function(j, "function", audit);
  audit.raise();
  return f;
}

SystemConfig parse_system(const json& j) {
  KeyAudit audit;
  SystemConfig c = system_config(j, audit);
  audit.raise();
  return c;
}

ExperimentSpec parse_experiment(const json& doc) {
  try {
    return parse_document(doc);
  } catch (const ValidationError&) {
    throw;
  } catch (const json::exception& e) {
    throw ValidationError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

ExperimentSpec load_experiment(const fs::path& file) {
  std::ifstream is(file);
  if (!is) throw ValidationError("cannot open experiment file " + file.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
  return parse_experiment(doc);
}

RunResult run_experiment(ExperimentSpec spec, const RunOptions& opts) {
  if (opts.seed) spec.document["seed"] = *opts.seed;
  if (opts.grid_step) spec.document["grid_step"] = *opts.grid_step;
  spec = parse_experiment(spec.document);
  RunResult res;
  res.directory = fs::path(opts.out.value_or(spec.output)) / spec.hash();
  fs::create_directories(res.directory);
  Artifacts art(res.directory, spec);
  try {
    if (spec.command == "simulate") run_simulate(spec, opts, art);
    else if (spec.command == "limit") run_limit(spec, opts, art);
    else if (spec.command == "renewal") run_renewal(spec, art);
    else if (spec.command == "sweep") res.failures = run_sweep(spec, opts, art);
    else if (spec.command == "compare") res.failures = run_compare(spec, opts, art);
    else run_maps(spec, art);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  res.artifacts = art.finish(spec.document);
  res.exit_code = res.failures.empty() ? 0 : 3;
  return res;
}

}  // namespace httq
