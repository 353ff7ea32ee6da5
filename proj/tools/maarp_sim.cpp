// Simulator for resource-constrained games: runs score/price dynamics from a
// config file, or solves/validates the configured instance.
#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "maarp/runner.hpp"

namespace {

enum ExitCode : int { kOk = 0, kInputError = 1, kRuntimeError = 2, kOracleError = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mirror-ascent resource-pricing game simulator"};

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::int64_t samples = 0, iters = 0, record_every = 0;
  std::vector<std::string> algorithms;
  std::string mirror;
  bool run_oracle = false, run_validate = false;

  app.add_option("--config", config_path, "experiment config file")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  auto* seed_opt =
      app.add_option("--seed", seed, "master seed (overrides run.master_seed)");
  app.add_option("--samples", samples, "Monte-Carlo samples (overrides run.samples)");
  app.add_option("--iters", iters, "iterations (overrides run.iters)");
  app.add_option("--algorithm", algorithms,
                 "algorithm to run, repeatable (overrides run.algorithms)");
  app.add_option("--mirror", mirror, "mirror map: entropy | euclidean");
  app.add_option("--record-every", record_every,
                 "record cadence (overrides run.record_every)");
  auto* oracle_flag =
      app.add_flag("--oracle", run_oracle, "solve the equilibrium and write vne.txt");
  app.add_flag("--validate", run_validate,
               "report monotonicity/Slater/bound/schedule checks")
      ->excludes(oracle_flag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    maarp::config::ExperimentConfig cfg =
        maarp::config::parse_config_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_opt->count() > 0) cfg.master_seed = seed;
    if (samples > 0) cfg.samples = samples;
    if (iters > 0) cfg.iters = iters;
    if (record_every > 0) cfg.record_every = record_every;
    if (!mirror.empty()) {
      if (mirror == "entropy")
        cfg.mirror = maarp::geometry::RegularizerKind::entropy;
      else if (mirror == "euclidean")
        cfg.mirror = maarp::geometry::RegularizerKind::euclidean;
      else
        throw maarp::InputError("unknown mirror '" + mirror + "'");
    }
    if (!algorithms.empty()) {
      cfg.algorithms.clear();
      for (const auto& a : algorithms)
        cfg.algorithms.push_back(maarp::dynamics::algorithm_from_name(a));
    }

    if (run_validate) {
      std::cout << maarp::runner::validate_command(cfg);
      return kOk;
    }
    if (run_oracle) {
      maarp::runner::oracle_command(cfg, &std::cout);
      return kOk;
    }
    maarp::runner::execute(cfg, /*threads=*/0, &std::cout);
    return kOk;
  } catch (const maarp::OracleError& e) {
    std::cerr << "oracle error: " << e.what() << "\n";
    return kOracleError;
  } catch (const maarp::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const maarp::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
