#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maarp/dynamics.hpp"
#include "maarp/errors.hpp"
#include "maarp/geometry.hpp"
#include "maarp/metrics.hpp"

namespace maarp::config {

// Fully resolved experiment description. Sections and keys mirror the config
// file; every field has a documented default except game.N and game.D.
struct ExperimentConfig {
  // [game]
  Eigen::Index agents = 0;  // N, required
  Eigen::Index dim = 0;     // D, required
  std::uint64_t game_seed = 1;
  double c_scale = 4.0;
  double c_offset = 0.0;

  // [constraints] A_i = a_scale * I (so R = D), b = d * ones
  std::optional<Eigen::Index> resources;  // default D
  double a_scale = 4.0;
  std::optional<double> d;  // default a_scale * N / R + 0.5 (barycenter margin -0.5)

  // [schedule]
  double gamma0 = 0.5;
  double p = 0.5;
  double alpha = 5.0;

  // [noise]
  dynamics::NoiseModel::Kind noise_kind = dynamics::NoiseModel::Kind::none;
  double sigma = 0.0;

  // [run]
  std::vector<dynamics::AlgorithmKind> algorithms = {dynamics::AlgorithmKind::maarp};
  std::int64_t iters = 100000;
  std::int64_t samples = 1;
  std::optional<std::int64_t> record_every;  // default 10 when iters >= 1e4, else 1
  std::uint64_t master_seed = 0;
  geometry::RegularizerKind mirror = geometry::RegularizerKind::entropy;
  metrics::ErgodicWeighting ergodic_weighting = metrics::ErgodicWeighting::gamma_weighted;
  double y0 = 0.0;
  double lambda0 = 0.0;

  // [output]
  std::string out_dir = "out";
  std::vector<std::string> emit = {"rnccv_state", "rnccv_ergodic"};

  Eigen::Index resolved_resources() const { return resources.value_or(dim); }
  double resolved_d() const {
    return d ? *d : a_scale * double(agents) / double(resolved_resources()) + 0.5;
  }
  std::int64_t resolved_record_every() const {
    return record_every.value_or(iters >= 10000 ? 10 : 1);
  }
};

// Metric names accepted in output.emit.
const std::vector<std::string>& known_metrics();

// Parses the sectioned key=value format. Unknown sections or keys, malformed
// lines, and out-of-range values raise InputError tagged "<name>:<line>:".
ExperimentConfig parse_config_text(const std::string& text, const std::string& name);
ExperimentConfig parse_config_file(const std::string& path);

// Deterministic dump of every resolved field; hashing it identifies the
// effective experiment (CLI overrides included).
std::string canonical_text(const ExperimentConfig& cfg);

std::uint64_t fnv1a(const std::string& text);

}  // namespace maarp::config
