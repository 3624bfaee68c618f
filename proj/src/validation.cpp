#include "httq/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "httq/limit_lab.hpp"
#include "httq/parallel.hpp"
#include "httq/renewal.hpp"

namespace httq {

GapStatistic coupling_gap(const ScaledBundle& b, std::uint64_t replication) {
  const double T = b.omega_grid.horizon();
  return {"coupling_gap", b.G_hat.sup_norm(0.0, T), b.n, T, replication, 0};
}

GapStatistic little_gap(const ScaledBundle& b, std::uint64_t replication) {
  GapStatistic g{"little_gap", 0.0, b.n, b.omega_grid.horizon(), replication, 0};
  const auto qs = b.Q.sample(b.omega_grid);
  for (std::size_t k = 0; k < qs.size(); ++k) {
    if (b.omega_truncated[k]) {
      ++g.excluded;
      continue;
    }
    g.value = std::max(g.value, std::abs(b.mu * b.omega[k] - qs[k]));
  }
  return g;
}

GapStatistic neg_part_sup(const ScaledBundle& b, std::uint64_t replication) {
  const double T = b.omega_grid.horizon();
  return {"neg_part_sup", std::max(0.0, -b.X.inf(0.0, T)), b.n, T, replication, 0};
}

ComparisonVerdict compare_abandonment(const SystemConfig& config, std::uint64_t seed, std::uint64_t replication) {
  SystemConfig with = config, without = config;
  with.abandon = true;
  without.abandon = false;
  const SimRecord a = simulate(with, seed, replication);
  const SimRecord b = simulate(without, seed, replication);
  const CadlagPath qa = a.Q(), qb = b.Q();
  std::vector<double> ts{0.0};
  for (const auto& e : a.events) ts.push_back(e.time);
  for (const auto& e : b.events) ts.push_back(e.time);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  const auto va = qa.sample(ts), vb = qb.sample(ts);
  ComparisonVerdict v;
  v.checked = ts.size();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (va[i] > vb[i]) {
      v.holds = false;
      v.violation_time = ts[i];
      v.q_with = va[i];
      v.q_without = vb[i];
      std::ostringstream os;
      os << "Q with abandonment " << va[i] << " exceeds Q without " << vb[i] << " at t=" << ts[i] << " (seed " << seed
         << ", replication " << replication << ", config " << config.fingerprint() << ")";
      v.dump = os.str();
      break;
    }
  }
  return v;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

namespace {
double quantile_sorted(const std::vector<double>& v, double p) {
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= v.size()) return v.back();
  return v[k] + (pos - static_cast<double>(k)) * (v[k + 1] - v[k]);
}
}  // namespace

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.median = quantile_sorted(values, 0.5);
  s.q25 = quantile_sorted(values, 0.25);
  s.q75 = quantile_sorted(values, 0.75);
  return s;
}

TrendVerdict trend_of(const std::string& statistic, const std::vector<double>& medians) {
  TrendVerdict t;
  t.statistic = statistic;
  if (medians.empty()) {
    t.verdict = "flat";
    return t;
  }
  t.first = medians.front();
  t.last = medians.back();
  t.verdict = t.last < t.first ? "decreasing" : (t.last > t.first ? "increasing" : "flat");
  t.strictly_decreasing = medians.size() > 1;
  for (std::size_t i = 1; i < medians.size(); ++i)
    if (!(medians[i] < medians[i - 1])) t.strictly_decreasing = false;
  return t;
}

const TrendVerdict& ConvergenceReport::trend(const std::string& statistic) const {
  for (const auto& t : trends)
    if (t.statistic == statistic) return t;
  throw std::out_of_range("no trend for statistic " + statistic);
}

LimitModel::LimitModel(const SystemConfig& base, double step)
    : base_(base),
      grid_(UniformGrid::covering(base.horizon, step)),
      g_(base.abandon ? FunctionTable::abandonment_drift(base.patience.limit_f(), base.mu) : FunctionTable::zero()),
      arrival_var_(base.mu * base.arrival.scv()),
      // the renewal-map limit carries the service noise unscaled, so exponential H
      // gives Brownian motion at rate mu there and standard Brownian motion in the
      // reflected limit
      service_var_(base.alpha >= 1.0 ? base.mu : 1.0) {
  base_.validate();
  if (base_.alpha >= 1.0) {
    M_ = compute_renewal_function(base_.service, base_.horizon, grid_.step);
    if (!base_.service.is_exponential()) sampler_.emplace(grid_, *M_);
  }
}

NoiseSample LimitModel::noises(std::uint64_t seed, std::uint64_t replication) const {
  return sample_noises(arrival_var_, service_var_, grid_, sampler(), seed, replication);
}

double LimitModel::initial_xi(std::uint64_t seed, std::uint64_t replication) const {
  if (!base_.initial.xi_law) return base_.initial.xi;
  RandomStream init(seed, {replication, Purpose::initial, 7});
  return base_.initial.xi_law->sample(init);
}

LimitSolution LimitModel::solve(double xi, const NoiseSample& ns) const {
  if (M_) return solve_limit_case_ii(xi, ns.E, ns.S, base_.beta, base_.mu, g_, *M_, grid_);
  return solve_limit_case_i(xi, ns.E, ns.S, base_.beta, base_.mu, g_, grid_);
}

LimitSolution LimitModel::solve(std::uint64_t seed, std::uint64_t replication) const {
  return solve(initial_xi(seed, replication), noises(seed, replication));
}

std::vector<std::vector<double>> limit_marginals(const SystemConfig& base, const std::vector<double>& checkpoints,
                                                 std::size_t samples, double step, std::uint64_t seed, unsigned workers) {
  const LimitModel model(base, step);
  const UniformGrid& grid = model.grid();
  // checkpoints off the grid read the linear interpolant between neighbours
  struct Where {
    std::size_t k;
    double w;
  };
  std::vector<Where> at;
  for (double t : checkpoints) {
    if (t < 0.0 || t > grid.horizon() * (1.0 + 1e-12)) throw std::invalid_argument("checkpoint is outside the limit horizon");
    const double u = std::min(t / grid.step, static_cast<double>(grid.intervals));
    double k = std::floor(u);
    double w = u - k;
    if (w > 1.0 - 1e-9) k += 1.0, w = 0.0;
    if (w < 1e-9) w = 0.0;
    at.push_back({static_cast<std::size_t>(k), w});
  }
  const auto finals = parallel_map(samples, workers, [&](std::size_t r) {
    const LimitSolution sol = model.solve(seed, r);
    std::vector<double> v;
    for (const auto& [k, w] : at) v.push_back(w == 0.0 ? sol.X[k] : (1.0 - w) * sol.X[k] + w * sol.X[k + 1]);
    return v;
  });
  std::vector<std::vector<double>> out(checkpoints.size(), std::vector<double>(samples));
  for (std::size_t r = 0; r < samples; ++r)
    for (std::size_t c = 0; c < checkpoints.size(); ++c) out[c][r] = finals[r][c];
  return out;
}

SystemConfig random_comparison_config(std::uint64_t seed, std::uint64_t index) {
  RandomStream rs(seed, {index, Purpose::initial, 11});
  auto pick = [&](int k) { return static_cast<int>(rs.uniform() * k) % k; };
  auto between = [&](double a, double b) { return a + (b - a) * rs.uniform(); };
  SystemConfig c;
  const double alphas[] = {0.0, 0.5, 1.0};
  c.alpha = alphas[pick(3)];
  c.mu = between(0.5, 2.0);
  c.n = std::round(between(4.0, 150.0));
  c.beta = between(-2.0, 2.0);
  c.horizon = between(2.0, 12.0);
  // keep the initial head count N + ceil(sqrt(n) xi) nonnegative
  const double floor_xi = -static_cast<double>(c.servers()) / std::sqrt(c.n);
  c.initial.xi = between(std::max(-1.0, floor_xi), 1.5);
  if (c.alpha >= 1.0) {
    switch (pick(5)) {
      case 0: c.service = DistributionSpec::exponential(c.mu); break;
      case 1: c.service = DistributionSpec::deterministic(1.0 / c.mu); break;
      case 2: c.service = DistributionSpec::erlang(3, 3.0 * c.mu); break;
      case 3: c.service = DistributionSpec::hyperexponential({0.4, 0.6}, {0.5 * c.mu, 3.0 * c.mu}); break;
      default: c.service = DistributionSpec::lognormal(-std::log(c.mu) - 0.125, 0.5); break;
    }
  } else {
    c.service = DistributionSpec::exponential(c.mu);
  }
  switch (pick(4)) {
    case 0: c.arrival = ArrivalSpec::poisson(); break;
    case 1: c.arrival = ArrivalSpec(DistributionSpec::erlang(2, 2.0)); break;
    case 2: c.arrival = ArrivalSpec(DistributionSpec::uniform(0.0, 2.0)); break;
    default: c.arrival = ArrivalSpec(DistributionSpec::hyperexponential({0.5, 0.5}, {2.0, 2.0 / 3.0})); break;
  }
  switch (pick(4)) {
    case 0: c.patience = PatienceSpec::no_scaling(DistributionSpec::exponential(between(0.2, 3.0))); break;
    case 1: c.patience = PatienceSpec::no_scaling(DistributionSpec::uniform(0.0, between(0.5, 4.0))); break;
    case 2: c.patience = PatienceSpec::hazard_rate(ScalarFunction::linear(between(0.2, 2.0))); break;
    default: c.patience = PatienceSpec::direct_f(ScalarFunction::linear(between(0.2, 2.0))); break;
  }
  c.validate();
  return c;
}

ConvergenceReport convergence_sweep(const SweepSpec& spec) {
  if (spec.ns.empty() || spec.replications == 0) throw std::invalid_argument("sweep needs n values and replications");
  const SystemConfig& base = spec.base;
  base.validate();
  const double T = base.horizon;
  ConvergenceReport rep;
  rep.ns = spec.ns;
  rep.checkpoints = spec.checkpoints.empty() ? std::vector<double>{T / 4.0, T / 2.0, T} : spec.checkpoints;
  rep.replications = spec.replications;
  rep.limit_samples = spec.limit_samples ? spec.limit_samples : spec.replications;
  rep.seed = spec.seed;

  const ScalarFunction f = base.abandon ? base.patience.limit_f() : ScalarFunction::constant(0.0);
  const std::vector<std::string> names{"coupling_gap", "little_gap", "neg_part_sup"};

  struct RepResult {
    double coupling = 0.0, little = 0.0, negsup = 0.0;
    std::size_t excluded = 0;
    std::vector<double> marginals;
  };

  for (double n : spec.ns) {
    SystemConfig cfg = base;
    cfg.n = n;
    cfg.validate();
    const double rn = std::sqrt(n);
    const double N = static_cast<double>(cfg.servers());
    const auto results = parallel_map(spec.replications, spec.workers, [&](std::size_t r) {
      const SimRecord rec = simulate(cfg, spec.seed, r);
      const ScaledBundle b = scale(rec, f, spec.omega_step);
      RepResult out;
      out.coupling = coupling_gap(b, r).value;
      const GapStatistic lg = little_gap(b, r);
      out.little = lg.value;
      out.excluded = lg.excluded;
      out.negsup = neg_part_sup(b, r).value;
      const CadlagPath X = rec.X();
      for (double t : rep.checkpoints) out.marginals.push_back((X(t) - N) / rn);
      return out;
    });
    SweepLevel lvl;
    lvl.n = n;
    lvl.marginals.assign(rep.checkpoints.size(), std::vector<double>(spec.replications));
    for (std::size_t r = 0; r < results.size(); ++r) {
      lvl.values["coupling_gap"].push_back(results[r].coupling);
      lvl.values["little_gap"].push_back(results[r].little);
      lvl.values["neg_part_sup"].push_back(results[r].negsup);
      lvl.truncated += results[r].excluded;
      for (std::size_t c = 0; c < rep.checkpoints.size(); ++c) lvl.marginals[c][r] = results[r].marginals[c];
    }
    for (const auto& name : names) lvl.stats[name] = summarize(lvl.values[name]);
    rep.levels.push_back(std::move(lvl));
  }

  for (const auto& name : names) {
    std::vector<double> med;
    for (const auto& l : rep.levels) med.push_back(l.stats.at(name).median);
    rep.trends.push_back(trend_of(name, med));
  }

  if (spec.with_limit) {
    rep.limit_marginals =
        limit_marginals(base, rep.checkpoints, rep.limit_samples, spec.limit_step, spec.seed, spec.workers);
    for (std::size_t c = 0; c < rep.checkpoints.size(); ++c) {
      std::vector<double> ks;
      for (auto& l : rep.levels) {
        l.ks.push_back(ks_two_sample(l.marginals[c], rep.limit_marginals[c]));
        ks.push_back(l.ks.back());
      }
      std::ostringstream name;
      name << "ks@" << rep.checkpoints[c];
      rep.trends.push_back(trend_of(name.str(), ks));
    }
  }
  return rep;
}

}  // namespace httq
