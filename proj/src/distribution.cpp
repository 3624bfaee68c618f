#include "httq/distribution.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace httq {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid distribution: " + what);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

// P(Gamma(k, rate) <= x)
double erlang_cdf(int k, double rate, double x) {
  if (x <= 0.0) return 0.0;
  const double rx = rate * x;
  double term = std::exp(-rx);
  double sum = term;
  for (int i = 1; i < k; ++i) {
    term *= rx / i;
    sum += term;
  }
  return std::max(0.0, 1.0 - sum);
}

double exp_partial(double rate, double x) {
  if (x <= 0.0) return 0.0;
  const double rx = rate * x;
  return -std::expm1(-rx) / rate - x * std::exp(-rx);
}

}  // namespace

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

DistributionSpec DistributionSpec::exponential(double rate) {
  require(positive_finite(rate), "exponential rate must be positive");
  return DistributionSpec(Exponential{rate});
}

DistributionSpec DistributionSpec::deterministic(double value) {
  require(positive_finite(value), "deterministic value must be positive (no atom at the origin)");
  return DistributionSpec(Deterministic{value});
}

DistributionSpec DistributionSpec::erlang(int stages, double stage_rate) {
  require(stages >= 1, "erlang needs at least one stage");
  require(positive_finite(stage_rate), "erlang stage rate must be positive");
  return DistributionSpec(Erlang{stages, stage_rate});
}

DistributionSpec DistributionSpec::hyperexponential(std::vector<double> probs, std::vector<double> rates) {
  require(!probs.empty() && probs.size() == rates.size(), "hyperexponential needs matching probs and rates");
  for (double p : probs) require(std::isfinite(p) && p >= 0.0 && p <= 1.0, "probabilities must lie in [0,1]");
  for (double r : rates) require(positive_finite(r), "hyperexponential rates must be positive");
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  require(std::abs(total - 1.0) <= 1e-9, "probabilities must sum to 1");
  return DistributionSpec(Hyperexponential{std::move(probs), std::move(rates)});
}

DistributionSpec DistributionSpec::lognormal(double mu, double sigma) {
  require(std::isfinite(mu), "lognormal mu must be finite");
  require(positive_finite(sigma), "lognormal sigma must be positive");
  return DistributionSpec(Lognormal{mu, sigma});
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0, "uniform bounds must be finite and nonnegative");
  require(lo < hi, "uniform needs lo < hi");
  return DistributionSpec(Uniform{lo, hi});
}

DistributionSpec DistributionSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string family(text.substr(0, colon));
  std::map<std::string, std::string> kv;
  if (colon != std::string_view::npos) {
    std::string rest(text.substr(colon + 1));
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("malformed distribution parameter '" + item + "'");
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("distribution '" + family + "' needs parameter '" + key + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto num = [&](const std::string& key) { return std::stod(take(key)); };
  auto list = [&](const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(take(key));
    std::string item;
    while (std::getline(ss, item, '/')) out.push_back(std::stod(item));
    return out;
  };

  DistributionSpec out = [&] {
    if (family == "exp" || family == "exponential") return exponential(num("rate"));
    if (family == "det" || family == "deterministic") return deterministic(num("value"));
    if (family == "erlang") {
      const int k = std::stoi(take("stages"));
      const double r = kv.count("stage_rate") ? num("stage_rate") : num("rate");
      return erlang(k, r);
    }
    if (family == "hyperexp" || family == "hyperexponential") {
      auto p = list("probs");
      return hyperexponential(std::move(p), list("rates"));
    }
    if (family == "lognormal") {
      const double m = num("mu");
      return lognormal(m, num("sigma"));
    }
    if (family == "uniform") {
      const double lo = num("lo");
      return uniform(lo, num("hi"));
    }
    throw std::invalid_argument("unknown distribution family '" + family + "'");
  }();
  if (!kv.empty()) {
    std::string keys;
    for (const auto& [k, v] : kv) keys += (keys.empty() ? "" : ", ") + k;
    throw std::invalid_argument("unknown distribution parameters: " + keys);
  }
  return out;
}

std::string_view DistributionSpec::family_name() const {
  return std::visit(overloaded{[](const Exponential&) { return "exponential"; },
                               [](const Deterministic&) { return "deterministic"; },
                               [](const Erlang&) { return "erlang"; },
                               [](const Hyperexponential&) { return "hyperexponential"; },
                               [](const Lognormal&) { return "lognormal"; },
                               [](const Uniform&) { return "uniform"; }},
                    params_);
}

std::string DistributionSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{[&](const Exponential& d) { os << "exp:rate=" << d.rate; },
                        [&](const Deterministic& d) { os << "det:value=" << d.value; },
                        [&](const Erlang& d) { os << "erlang:stages=" << d.stages << ",rate=" << d.stage_rate; },
                        [&](const Hyperexponential& d) {
                          os << "hyperexp:probs=";
                          for (std::size_t i = 0; i < d.probs.size(); ++i) os << (i ? "/" : "") << d.probs[i];
                          os << ",rates=";
                          for (std::size_t i = 0; i < d.rates.size(); ++i) os << (i ? "/" : "") << d.rates[i];
                        },
                        [&](const Lognormal& d) { os << "lognormal:mu=" << d.mu << ",sigma=" << d.sigma; },
                        [&](const Uniform& d) { os << "uniform:lo=" << d.lo << ",hi=" << d.hi; }},
             params_);
  return os.str();
}

bool DistributionSpec::is_exponential() const {
  if (std::holds_alternative<Exponential>(params_)) return true;
  if (const auto* e = std::get_if<Erlang>(&params_)) return e->stages == 1;
  return false;
}

double DistributionSpec::mean() const {
  return std::visit(overloaded{[](const Exponential& d) { return 1.0 / d.rate; },
                               [](const Deterministic& d) { return d.value; },
                               [](const Erlang& d) { return d.stages / d.stage_rate; },
                               [](const Hyperexponential& d) {
                                 double m = 0.0;
                                 for (std::size_t i = 0; i < d.probs.size(); ++i) m += d.probs[i] / d.rates[i];
                                 return m;
                               },
                               [](const Lognormal& d) { return std::exp(d.mu + 0.5 * d.sigma * d.sigma); },
                               [](const Uniform& d) { return 0.5 * (d.lo + d.hi); }},
                    params_);
}

double DistributionSpec::variance() const {
  return std::visit(overloaded{[](const Exponential& d) { return 1.0 / (d.rate * d.rate); },
                               [](const Deterministic&) { return 0.0; },
                               [](const Erlang& d) { return d.stages / (d.stage_rate * d.stage_rate); },
                               [](const Hyperexponential& d) {
                                 double m = 0.0, m2 = 0.0;
                                 for (std::size_t i = 0; i < d.probs.size(); ++i) {
                                   m += d.probs[i] / d.rates[i];
                                   m2 += 2.0 * d.probs[i] / (d.rates[i] * d.rates[i]);
                                 }
                                 return m2 - m * m;
                               },
                               [](const Lognormal& d) {
                                 const double s2 = d.sigma * d.sigma;
                                 return std::expm1(s2) * std::exp(2.0 * d.mu + s2);
                               },
                               [](const Uniform& d) { return (d.hi - d.lo) * (d.hi - d.lo) / 12.0; }},
                    params_);
}

double DistributionSpec::cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return std::visit(overloaded{[&](const Exponential& d) { return -std::expm1(-d.rate * x); },
                               [&](const Deterministic& d) { return x >= d.value ? 1.0 : 0.0; },
                               [&](const Erlang& d) { return erlang_cdf(d.stages, d.stage_rate, x); },
                               [&](const Hyperexponential& d) {
                                 double c = 0.0;
                                 for (std::size_t i = 0; i < d.probs.size(); ++i)
                                   c += d.probs[i] * -std::expm1(-d.rates[i] * x);
                                 return c;
                               },
                               [&](const Lognormal& d) { return standard_normal_cdf((std::log(x) - d.mu) / d.sigma); },
                               [&](const Uniform& d) {
                                 if (x <= d.lo) return 0.0;
                                 if (x >= d.hi) return 1.0;
                                 return (x - d.lo) / (d.hi - d.lo);
                               }},
                    params_);
}

double DistributionSpec::partial_expectation(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return mean();
  return std::visit(
      overloaded{[&](const Exponential& d) { return exp_partial(d.rate, x); },
                 [&](const Deterministic& d) { return x >= d.value ? d.value : 0.0; },
                 [&](const Erlang& d) { return d.stages / d.stage_rate * erlang_cdf(d.stages + 1, d.stage_rate, x); },
                 [&](const Hyperexponential& d) {
                   double m = 0.0;
                   for (std::size_t i = 0; i < d.probs.size(); ++i) m += d.probs[i] * exp_partial(d.rates[i], x);
                   return m;
                 },
                 [&](const Lognormal& d) {
                   const double s2 = d.sigma * d.sigma;
                   return std::exp(d.mu + 0.5 * s2) * standard_normal_cdf((std::log(x) - d.mu - s2) / d.sigma);
                 },
                 [&](const Uniform& d) {
                   if (x <= d.lo) return 0.0;
                   const double top = std::min(x, d.hi);
                   return (top * top - d.lo * d.lo) / (2.0 * (d.hi - d.lo));
                 }},
      params_);
}

double DistributionSpec::integrated_cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  return x * cdf(x) - partial_expectation(x);
}

double DistributionSpec::density_at_zero() const {
  return std::visit(overloaded{[](const Exponential& d) { return d.rate; },
                               [](const Deterministic&) { return 0.0; },
                               [](const Erlang& d) { return d.stages == 1 ? d.stage_rate : 0.0; },
                               [](const Hyperexponential& d) {
                                 double s = 0.0;
                                 for (std::size_t i = 0; i < d.probs.size(); ++i) s += d.probs[i] * d.rates[i];
                                 return s;
                               },
                               [](const Lognormal&) { return 0.0; },
                               [](const Uniform& d) { return d.lo == 0.0 ? 1.0 / d.hi : 0.0; }},
                    params_);
}

double DistributionSpec::quantile(double p) const {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) {
    if (const auto* d = std::get_if<Deterministic>(&params_)) return d->value;
    if (const auto* u = std::get_if<Uniform>(&params_)) return u->hi;
    return std::numeric_limits<double>::infinity();
  }
  if (const auto* d = std::get_if<Exponential>(&params_)) return -std::log1p(-p) / d->rate;
  if (const auto* d = std::get_if<Deterministic>(&params_)) return d->value;
  if (const auto* u = std::get_if<Uniform>(&params_)) return u->lo + p * (u->hi - u->lo);
  return invert_cdf([this](double x) { return cdf(x); }, p, 0.0, std::max(1.0, mean()));
}

double DistributionSpec::sample(RandomStream& stream) const {
  return std::visit(overloaded{[&](const Exponential& d) { return stream.exponential() / d.rate; },
                               [&](const Deterministic& d) { return d.value; },
                               [&](const Erlang& d) {
                                 double s = 0.0;
                                 for (int i = 0; i < d.stages; ++i) s += stream.exponential();
                                 return s / d.stage_rate;
                               },
                               [&](const Hyperexponential& d) {
                                 const double u = stream.uniform();
                                 double acc = 0.0;
                                 std::size_t pick = d.probs.size() - 1;
                                 for (std::size_t i = 0; i < d.probs.size(); ++i) {
                                   acc += d.probs[i];
                                   if (u < acc) {
                                     pick = i;
                                     break;
                                   }
                                 }
                                 return stream.exponential() / d.rates[pick];
                               },
                               [&](const Lognormal& d) { return std::exp(d.mu + d.sigma * stream.standard_normal()); },
                               [&](const Uniform& d) { return d.lo + (d.hi - d.lo) * stream.uniform(); }},
                    params_);
}

DistributionSpec DistributionSpec::scaled(double factor) const {
  require(positive_finite(factor), "scale factor must be positive");
  return std::visit(overloaded{[&](const Exponential& d) { return exponential(d.rate / factor); },
                               [&](const Deterministic& d) { return deterministic(d.value * factor); },
                               [&](const Erlang& d) { return erlang(d.stages, d.stage_rate / factor); },
                               [&](const Hyperexponential& d) {
                                 std::vector<double> r = d.rates;
                                 for (double& x : r) x /= factor;
                                 return hyperexponential(d.probs, std::move(r));
                               },
                               [&](const Lognormal& d) { return lognormal(d.mu + std::log(factor), d.sigma); },
                               [&](const Uniform& d) { return uniform(d.lo * factor, d.hi * factor); }},
                    params_);
}

bool operator==(const DistributionSpec& a, const DistributionSpec& b) { return a.describe() == b.describe(); }

}  // namespace httq
