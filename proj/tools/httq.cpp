#include <CLI11.hpp>
#include <iostream>

#include "httq/experiment.hpp"
#include "httq/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"heavy-traffic many-server queue lab"};
  app.require_subcommand(1);

  httq::RunOptions opts;
  std::uint64_t seed = 0;
  double grid_step = 0.0;
  std::string out;
  std::string file;
  std::string service;
  double horizon = 0.0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "master seed (overrides the file)");
    sub->add_option("--workers", opts.workers, "worker threads (default HTTQ_WORKERS, then all cores)");
    sub->add_option("--out", out, "base output directory (overrides the file)");
    sub->add_flag("--check", opts.check, "exit 3 when thresholds fail");
    sub->add_option("--grid-step", grid_step, "numerical or output grid step");
  };
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "replicate the finite-n system and write diffusion-scaled paths"},
      {"limit", "sample the limit process"},
      {"sweep", "convergence statistics over a sequence of n"},
      {"compare", "coupled runs with and without abandonment"},
      {"maps", "solve one regulator map on a given input"}};
  for (const auto& [name, about] : commands) {
    auto* sub = app.add_subcommand(name, about);
    sub->add_option("spec", file, "experiment JSON file")->required();
    common(sub);
  }
  auto* renewal = app.add_subcommand("renewal", "renewal function of a service law");
  renewal->add_option("spec", file, "experiment JSON file");
  renewal->add_option("--service", service, "service law, e.g. exp:rate=1");
  renewal->add_option("--T", horizon, "horizon");
  common(renewal);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--grid-step")) opts.grid_step = grid_step;
  if (sub->count("--out")) opts.out = out;
  opts.workers = httq::resolve_workers(opts.workers);

  try {
    httq::ExperimentSpec spec;
    if (!file.empty()) {
      spec = httq::load_experiment(file);
      if (spec.command != command)
        throw httq::ValidationError("file describes a '" + spec.command + "' run, not '" + command + "'");
    } else {
      nlohmann::json doc = {{"command", "renewal"}, {"renewal", nlohmann::json::object()}};
      spec = httq::parse_experiment(doc);
    }
    if (command == "renewal" && (renewal->count("--service") || renewal->count("--T"))) {
      if (renewal->count("--service")) spec.document["renewal"]["service"] = service;
      if (renewal->count("--T")) spec.document["renewal"]["horizon"] = horizon;
      spec = httq::parse_experiment(spec.document);
    }
    const httq::RunResult res = httq::run_experiment(spec, opts);
    std::cout << res.directory.string() << '\n';
    for (const auto& f : res.artifacts) std::cout << "  " << f << '\n';
    for (const auto& f : res.failures) std::cerr << "threshold failure: " << f << '\n';
    return res.exit_code;
  } catch (const httq::ValidationError& e) {
    std::cerr << "invalid experiment: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
