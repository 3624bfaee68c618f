#pragma once

#include <optional>
#include <vector>

#include "httq/cadlag_path.hpp"
#include "httq/event_sim.hpp"
#include "httq/scalar_function.hpp"

namespace httq {

/// Diffusion-scaled processes of one replication.
struct ScaledBundle {
  double n = 0.0;
  double mu = 1.0;
  long servers = 0;
  CadlagPath E;             // (E - lambda t) / sqrt(n)
  CadlagPath S_raw;         // (S - mu^n \int min(X, N)) / sqrt(n)
  CadlagPath G;             // G / sqrt(n)
  CadlagPath X;             // (X - N) / sqrt(n)
  CadlagPath Q;             // X^+
  CadlagPath compensator;   // mu \int_0^t f(Q(s) / mu) ds
  CadlagPath G_hat;         // G - compensator
  UniformGrid omega_grid;
  std::vector<double> omega;  // sqrt(n) times virtual wait; NaN where truncated
  std::vector<bool> omega_truncated;
  std::size_t truncated_count = 0;
};

/// `omega_step` defaults to horizon / 200.
ScaledBundle scale(const SimRecord& record, const ScalarFunction& f, std::optional<double> omega_step = std::nullopt,
                   std::optional<double> horizon = std::nullopt);

}  // namespace httq
