#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "httq/scalar_function.hpp"
#include "httq/system_config.hpp"

namespace httq {

inline constexpr const char* kVersion = "0.1.0";

/// Raised for anything wrong with an experiment file; maps to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Thresholds {
  std::vector<std::string> strictly_decreasing{"coupling_gap", "little_gap"};
  std::vector<std::string> decreasing;
  /// statistic -> bound on median(last n) / median(first n)
  std::vector<std::pair<std::string, double>> max_ratio;
  /// bound on every KS distance at the largest n
  std::optional<double> ks_max;
};

struct MapInputs {
  std::string map = "skorokhod_g";  // skorokhod_g, phi_n_g, phi_M, phi_Mg
  double xi = 0.0;
  double drift = 0.0;
  double noise_rate = 1.0;
  double horizon = 10.0;
  double mu = 1.0;
  double mu_n = 10.0;
  DistributionSpec service = DistributionSpec::exponential(1.0);
  std::optional<ScalarFunction> f;
};

struct ExperimentSpec {
  std::string command;
  SystemConfig system;
  std::uint64_t seed = 1;
  std::size_t replications = 1;
  std::vector<double> ns;
  std::vector<double> checkpoints;
  std::size_t limit_samples = 0;
  std::optional<double> grid_step;
  std::string output = "runs";
  Thresholds thresholds;
  /// renewal command
  DistributionSpec renewal_service = DistributionSpec::exponential(1.0);
  double renewal_horizon = 10.0;
  /// compare command: 0 runs only `system`, k > 0 draws k random systems
  std::size_t random_configs = 0;
  MapInputs maps;

  /// The parsed document with command-line overrides applied; its sorted
  /// dump is hashed to name the run directory.
  nlohmann::json document;

  std::string canonical_text() const { return document.dump(); }
  std::string hash() const { return hex64(fnv1a(canonical_text())); }
};

/// Strict parse: unknown keys at any level are reported together.
ExperimentSpec parse_experiment(const nlohmann::json& doc);
ExperimentSpec load_experiment(const std::filesystem::path& file);

ScalarFunction parse_scalar_function(const nlohmann::json& j);
SystemConfig parse_system(const nlohmann::json& j);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<double> grid_step;
  std::optional<std::string> out;
  unsigned workers = 0;
  bool check = false;
};

struct RunResult {
  int exit_code = 0;
  std::filesystem::path directory;
  std::vector<std::string> artifacts;
  std::vector<std::string> failures;  // threshold failures under --check
};

/// Applies overrides, creates <out>/<spec hash>/ and writes every artifact
/// plus schema.json. Throws ValidationError for bad inputs.
RunResult run_experiment(ExperimentSpec spec, const RunOptions& opts);

}  // namespace httq
