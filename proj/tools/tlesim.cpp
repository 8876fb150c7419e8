// tlesim: run and report line-ensemble experiments.
//
//   tlesim run [experiment] [--config FILE] [--seed N] [--threads N] [--resume] [--output DIR]
//   tlesim report DIR
//
// Exit codes: 0 success, 2 config error, 3 invariant violation, 4 a report
// verdict failed, 1 anything else.

#include <CLI11.hpp>
#include <iostream>

#include "tle/config.hpp"
#include "tle/errors.hpp"
#include "tle/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulation of area-tilted line ensembles"};
  app.require_subcommand(1);

  std::string experiment, config_path, output;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool resume = false;
  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("experiment", experiment, "experiment kind (overrides the config file)");
  run->add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--resume", resume, "continue from the checkpoint in the output directory");
  run->add_option("--output", output, "override output_dir");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "summarize a finished run");
  report->add_option("dir", report_dir, "output directory of a run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      tle::ExperimentConfig cfg;
      if (!config_path.empty()) cfg = tle::load_config(config_path);
      if (!experiment.empty()) cfg.experiment = tle::parse_experiment_kind(experiment);
      if (*seed_opt) cfg.seed = seed;
      if (!output.empty()) cfg.output_dir = output;
      tle::validate(cfg);
      const auto summary = tle::run_experiment(cfg, {threads, resume});
      for (const auto& f : summary.files) std::cout << (summary.dir / f).string() << '\n';
      return 0;
    }
    return tle::report_experiment(report_dir, std::cout) ? 0 : 4;
  } catch (const tle::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const tle::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
