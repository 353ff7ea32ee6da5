#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "maarp/config.hpp"
#include "maarp/oracle.hpp"

namespace maarp::runner {

struct BuiltProblem {
  game::QuadraticGameSpec game;
  game::AffineConstraintSpec constraints;
  std::vector<geometry::Regularizer> regs;
  dynamics::Schedule schedule;
  dynamics::NoiseModel noise;
};

// Instantiates game, constraints, regularizers, schedule and noise model from
// a resolved config (game entries drawn from RngStream(game_seed, 0)).
BuiltProblem build_problem(const config::ExperimentConfig& cfg);

struct RunArtifacts {
  std::string out_dir;
  std::vector<std::string> files;  // paths relative to out_dir, sorted
  std::string manifest;            // manifest path relative to out_dir
};

// Runs every (algorithm, sample) pair on its own stream
// RngStream(master_seed, pair_index) with pair_index = algorithm_index *
// samples + sample_index, accumulates the emitted metrics online, and writes
// one CSV per metric per algorithm (plus a percentile-band CSV per metric per
// algorithm when samples > 1) and a manifest. Output is byte-identical across
// reruns and thread counts; rows are ordered by sample then iteration, with a
// row at every record_every-th step and at the final step.
//
// A failing sample is skipped (its rows are omitted and the failure recorded
// in the manifest); the first failure is rethrown after all artifacts are
// written. threads = 0 picks the hardware default.
RunArtifacts execute(const config::ExperimentConfig& cfg, unsigned threads = 0,
                     std::ostream* log = nullptr);

// Solves the variational equilibrium for the configured instance and writes
// it to <out_dir>/vne.txt.
oracle::VneSolution oracle_command(const config::ExperimentConfig& cfg,
                                   std::ostream* log = nullptr);

// Human-readable report: monotonicity eigenvalue, Slater margin, bound
// constants, and the schedule check against them.
std::string validate_command(const config::ExperimentConfig& cfg);

}  // namespace maarp::runner
