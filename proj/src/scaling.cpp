#include "httq/scaling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace httq {

ScaledBundle scale(const SimRecord& record, const ScalarFunction& f, std::optional<double> omega_step,
                   std::optional<double> horizon) {
  const SystemConfig& cfg = record.config;
  const double T = horizon.value_or(record.horizon);
  if (!(T > 0.0) || T > record.horizon * (1.0 + 1e-12)) throw std::invalid_argument("scaling grid reaches beyond the record");
  const double rn = std::sqrt(cfg.n);
  const double N = static_cast<double>(record.servers);
  const double mu = cfg.mu;

  ScaledBundle b;
  b.n = cfg.n;
  b.mu = mu;
  b.servers = record.servers;
  const double inv = 1.0 / rn;
  b.E = (record.E() - CadlagPath::affine(0.0, cfg.arrival_rate(), record.horizon)) * inv;
  b.S_raw = (record.S() - record.busy().integrated() * cfg.service_rate()) * inv;
  b.G = record.G() * inv;
  b.X = (record.X() + (-N)) * inv;
  b.Q = b.X.positive_part();
  b.compensator = b.Q.compose([&f, mu](double q) { return mu * f(q / mu); }).integrated();
  b.G_hat = b.G - b.compensator;

  b.omega_grid = UniformGrid::covering(T, omega_step.value_or(T / 200.0));
  const auto waits = virtual_waits(record, b.omega_grid.times());
  b.omega.resize(waits.size());
  b.omega_truncated.resize(waits.size());
  for (std::size_t k = 0; k < waits.size(); ++k) {
    b.omega_truncated[k] = waits[k].truncated;
    b.omega[k] = waits[k].truncated ? std::numeric_limits<double>::quiet_NaN() : rn * waits[k].value;
    if (waits[k].truncated) ++b.truncated_count;
  }
  return b;
}

}  // namespace httq
