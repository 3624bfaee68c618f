#include "httq/system_config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace httq {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

long SystemConfig::servers() const { return static_cast<long>(std::ceil(std::pow(n, alpha) - 1e-9)); }

double SystemConfig::arrival_rate() const { return ArrivalSpec::rate(n, mu, beta); }

double SystemConfig::service_rate() const { return std::pow(n, 1.0 - alpha) * mu; }

DistributionSpec SystemConfig::service_law() const {
  if (alpha < 1.0) return DistributionSpec::exponential(service_rate());
  return service;
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("invalid system: " + m); };
  if (!(n >= 1.0) || !std::isfinite(n)) fail("n must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (!(mu > 0.0) || !std::isfinite(mu)) fail("mu must be positive");
  if (!std::isfinite(beta)) fail("beta must be finite");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) fail("horizon must be positive");
  if (!(1.0 + beta / std::sqrt(n) > 0.0)) fail("arrival rate n mu (1 + beta/sqrt(n)) is not positive");
  if (std::abs(service.mean() * mu - 1.0) > 1e-9) fail("service law must have mean 1/mu");
  if (alpha < 1.0 && !service.is_exponential()) fail("alpha < 1 requires exponential service");
  if (initial.head_count && *initial.head_count < 0) fail("initial head count must be nonnegative");
  if (!initial.head_count && !initial.xi_law && servers() + std::ceil(std::sqrt(n) * initial.xi - 1e-9) < 0)
    fail("xi gives a negative initial head count");
}

std::string SystemConfig::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  os << "n=" << n << ";alpha=" << alpha << ";mu=" << mu << ";beta=" << beta << ";arrival=" << arrival.base().describe()
     << ";service=" << service.describe() << ";patience=" << patience.describe() << ";xi=" << initial.xi;
  if (initial.xi_law) os << ";xi_law=" << initial.xi_law->describe();
  if (initial.head_count) os << ";head_count=" << *initial.head_count;
  os << ";T=" << horizon << ";abandon=" << abandon;
  return os.str();
}

}  // namespace httq
