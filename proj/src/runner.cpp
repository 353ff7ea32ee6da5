#include "maarp/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "maarp/metrics.hpp"

namespace maarp::runner {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::int64_t> row_indices(std::int64_t iters, std::int64_t every) {
  std::vector<std::int64_t> rows;
  for (std::int64_t n = 0; n < iters; n += every) rows.push_back(n);
  if (rows.empty() || rows.back() != iters - 1) rows.push_back(iters - 1);
  return rows;
}

struct JobResult {
  // metric name -> one value per row
  std::vector<std::vector<double>> series;
  std::string error;  // empty on success
};

bool needs_solution(const std::vector<std::string>& emit) {
  return std::find(emit.begin(), emit.end(), "fenchel") != emit.end();
}

}  // namespace

BuiltProblem build_problem(const config::ExperimentConfig& cfg) {
  BuiltProblem p;
  numerics::RngStream game_stream(cfg.game_seed, 0);
  p.game = game::generate_random_game(cfg.agents, cfg.dim, game_stream,
                                      cfg.c_scale, cfg.c_offset);
  p.constraints = game::AffineConstraintSpec::identity_scaled(
      cfg.agents, cfg.dim, cfg.a_scale, cfg.resolved_d());
  p.regs = geometry::uniform_regularizers(cfg.mirror, cfg.agents, cfg.dim);
  p.schedule = dynamics::Schedule(cfg.gamma0, cfg.p, cfg.alpha);
  p.noise = dynamics::NoiseModel{cfg.noise_kind, cfg.sigma};
  return p;
}

RunArtifacts execute(const config::ExperimentConfig& cfg, unsigned threads,
                     std::ostream* log) {
  const BuiltProblem prob = build_problem(cfg);
  const std::int64_t every = cfg.resolved_record_every();
  const std::vector<std::int64_t> rows = row_indices(cfg.iters, every);
  const auto n_alg = std::int64_t(cfg.algorithms.size());
  const std::int64_t n_jobs = n_alg * cfg.samples;

  fs::create_directories(cfg.out_dir);

  // The Lyapunov-distance metric needs the equilibrium; reuse a saved artifact
  // when one matches, otherwise solve and save it.
  oracle::VneSolution solution;
  bool have_solution = false;
  const std::string vne_path = (fs::path(cfg.out_dir) / "vne.txt").string();
  if (needs_solution(cfg.emit)) {
    if (fs::exists(vne_path)) {
      solution = oracle::VneSolution::load(vne_path);
      if (solution.x.size() != prob.game.joint_dim() ||
          solution.lambda.size() != prob.constraints.resources)
        throw InputError("execute: " + vne_path + " does not match this instance");
    } else {
      oracle::SolveOptions sopts;
      sopts.seed = cfg.master_seed;
      solution = oracle::solve_vne(prob.game, prob.constraints, sopts);
      solution.save(vne_path);
    }
    have_solution = true;
  }

  const bool want_gamma_loads =
      std::find(cfg.emit.begin(), cfg.emit.end(), "cvio_max") != cfg.emit.end() ||
      (std::find(cfg.emit.begin(), cfg.emit.end(), "rnccv_ergodic") != cfg.emit.end() &&
       cfg.ergodic_weighting == metrics::ErgodicWeighting::gamma_weighted);
  const bool want_uniform_loads =
      std::find(cfg.emit.begin(), cfg.emit.end(), "rnccv_ergodic") != cfg.emit.end() &&
      cfg.ergodic_weighting == metrics::ErgodicWeighting::uniform;
  const bool want_loss_time =
      std::find(cfg.emit.begin(), cfg.emit.end(), "loss_timeavg") != cfg.emit.end();
  const bool want_loss_gamma =
      std::find(cfg.emit.begin(), cfg.emit.end(), "loss_gammaavg") != cfg.emit.end();

  std::vector<JobResult> results(static_cast<std::size_t>(n_jobs));

  auto run_job = [&](std::int64_t job) {
    JobResult& res = results[std::size_t(job)];
    const auto alg = cfg.algorithms[std::size_t(job / cfg.samples)];
    res.series.assign(cfg.emit.size(), {});
    for (auto& s : res.series) s.reserve(rows.size());

    metrics::RunningWeightedMean gamma_loads, uniform_loads;
    double loss_sum = 0.0, loss_gamma_sum = 0.0, gamma_sum = 0.0;
    std::int64_t steps_seen = 0;
    std::size_t next_row = 0;

    auto observer = [&](const dynamics::StepView& v) {
      if (want_gamma_loads) gamma_loads.add(v.gamma, v.loads);
      if (want_uniform_loads) uniform_loads.add(1.0, v.loads);
      double loss = 0.0;
      bool loss_done = false;
      if (want_loss_time || want_loss_gamma) {
        loss = game::average_loss(prob.game, v.x);
        loss_done = true;
        loss_sum += loss;
        loss_gamma_sum += v.gamma * loss;
        gamma_sum += v.gamma;
      }
      steps_seen += 1;
      if (next_row >= rows.size() || v.n != rows[next_row]) return;
      next_row += 1;
      for (std::size_t m = 0; m < cfg.emit.size(); ++m) {
        const std::string& name = cfg.emit[m];
        double value = 0.0;
        if (name == "rnccv_state") {
          value = metrics::rnccv(v.loads);
        } else if (name == "rnccv_ergodic") {
          value = metrics::rnccv(cfg.ergodic_weighting ==
                                         metrics::ErgodicWeighting::gamma_weighted
                                     ? gamma_loads.value()
                                     : uniform_loads.value());
        } else if (name == "cvio_max") {
          value = gamma_loads.value().maxCoeff();
        } else if (name == "loss_avg") {
          value = loss_done ? loss : game::average_loss(prob.game, v.x);
        } else if (name == "loss_timeavg") {
          value = loss_sum / double(steps_seen);
        } else if (name == "loss_gammaavg") {
          value = loss_gamma_sum / gamma_sum;
        } else if (name == "fenchel") {
          value = geometry::extended_distance(prob.regs, solution.x,
                                              solution.lambda, v.y, v.lambda);
        }
        res.series[m].push_back(value);
      }
    };

    try {
      dynamics::RunOptions opts;
      opts.y0 = cfg.y0;
      opts.lambda0 = cfg.lambda0;
      numerics::RngStream stream(cfg.master_seed, std::uint64_t(job));
      dynamics::run(alg, prob.game, prob.constraints, prob.schedule, prob.noise,
                    prob.regs, cfg.iters, stream, observer, opts);
    } catch (const std::exception& e) {
      res.error = e.what();
      res.series.clear();
    }
  };

  unsigned hw = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  hw = unsigned(std::min<std::int64_t>(hw, n_jobs));
  if (hw <= 1) {
    for (std::int64_t j = 0; j < n_jobs; ++j) run_job(j);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(hw);
    for (unsigned t = 0; t < hw; ++t)
      pool.emplace_back([&] {
        for (;;) {
          const std::int64_t j = next.fetch_add(1);
          if (j >= n_jobs) return;
          run_job(j);
        }
      });
    for (auto& t : pool) t.join();
  }

  // Emit CSVs in deterministic order: metric-major, then algorithm.
  RunArtifacts art;
  art.out_dir = cfg.out_dir;
  if (have_solution) art.files.push_back("vne.txt");
  for (std::size_t m = 0; m < cfg.emit.size(); ++m) {
    for (std::int64_t a = 0; a < n_alg; ++a) {
      const std::string alg = dynamics::algorithm_name(cfg.algorithms[std::size_t(a)]);
      const std::string base = cfg.emit[m] + "_" + alg;
      {
        std::ofstream out(fs::path(cfg.out_dir) / (base + ".csv"));
        if (!out) throw InputError("execute: cannot write " + base + ".csv");
        out << "iter,value\n";
        for (std::int64_t s = 0; s < cfg.samples; ++s) {
          const JobResult& res = results[std::size_t(a * cfg.samples + s)];
          if (!res.error.empty()) continue;
          for (std::size_t r = 0; r < rows.size(); ++r)
            out << rows[r] << "," << fmt17(res.series[m][r]) << "\n";
        }
        art.files.push_back(base + ".csv");
      }
      if (cfg.samples > 1) {
        std::vector<std::vector<double>> per_sample;
        for (std::int64_t s = 0; s < cfg.samples; ++s) {
          const JobResult& res = results[std::size_t(a * cfg.samples + s)];
          if (res.error.empty()) per_sample.push_back(res.series[m]);
        }
        if (!per_sample.empty()) {
          auto bands = metrics::percentile_bands(per_sample, {25, 50, 75, 90});
          std::ofstream out(fs::path(cfg.out_dir) / (base + "_bands.csv"));
          if (!out) throw InputError("execute: cannot write " + base + "_bands.csv");
          out << "iter,mean,p25,p50,p75,p90\n";
          for (std::size_t r = 0; r < rows.size(); ++r) {
            out << rows[r] << "," << fmt17(bands.mean(Eigen::Index(r)));
            for (Eigen::Index q = 0; q < 4; ++q)
              out << "," << fmt17(bands.bands(q, Eigen::Index(r)));
            out << "\n";
          }
          art.files.push_back(base + "_bands.csv");
        }
      }
    }
  }

  nlohmann::ordered_json manifest;
  const std::string canon = config::canonical_text(cfg);
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                (unsigned long long)config::fnv1a(canon));
  manifest["version"] = "maarp-sim 1.0.0";
  manifest["config_hash_fnv1a"] = hash;
  manifest["game_seed"] = cfg.game_seed;
  manifest["master_seed"] = cfg.master_seed;
  manifest["samples"] = cfg.samples;
  manifest["iters"] = cfg.iters;
  manifest["record_every"] = every;
  manifest["algorithms"] = nlohmann::ordered_json::array();
  for (auto a : cfg.algorithms)
    manifest["algorithms"].push_back(dynamics::algorithm_name(a));
  manifest["emit"] = cfg.emit;
  std::sort(art.files.begin(), art.files.end());
  manifest["files"] = art.files;
  manifest["failed_jobs"] = nlohmann::ordered_json::array();
  std::string first_error;
  for (std::int64_t j = 0; j < n_jobs; ++j) {
    const auto& res = results[std::size_t(j)];
    if (res.error.empty()) continue;
    if (first_error.empty()) first_error = res.error;
    nlohmann::ordered_json f;
    f["algorithm"] =
        dynamics::algorithm_name(cfg.algorithms[std::size_t(j / cfg.samples)]);
    f["sample"] = j % cfg.samples;
    f["error"] = res.error;
    manifest["failed_jobs"].push_back(f);
  }
  manifest["config"] = canon;
  {
    std::ofstream out(fs::path(cfg.out_dir) / "manifest.json");
    if (!out) throw InputError("execute: cannot write manifest.json");
    out << manifest.dump(2) << "\n";
  }
  art.manifest = "manifest.json";

  if (log) {
    *log << "wrote " << art.files.size() << " metric file(s) + manifest to "
         << cfg.out_dir << "\n";
  }
  if (!first_error.empty())
    throw NumericalError("execute: " + std::to_string(manifest["failed_jobs"].size()) +
                             " job(s) failed; first: " + first_error,
                         -1);
  return art;
}

oracle::VneSolution oracle_command(const config::ExperimentConfig& cfg,
                                   std::ostream* log) {
  const BuiltProblem prob = build_problem(cfg);
  oracle::SolveOptions sopts;
  sopts.seed = cfg.master_seed;
  oracle::VneSolution sol = oracle::solve_vne(prob.game, prob.constraints, sopts);
  fs::create_directories(cfg.out_dir);
  const std::string path = (fs::path(cfg.out_dir) / "vne.txt").string();
  sol.save(path);
  if (log) {
    *log << "vne solved: " << sol.iterations << " iterations, residual "
         << fmt17(sol.residual) << ", max load "
         << fmt17(game::constraint_eval(prob.constraints, sol.x).maxCoeff())
         << ", saved to " << path << "\n";
  }
  return sol;
}

std::string validate_command(const config::ExperimentConfig& cfg) {
  const BuiltProblem prob = build_problem(cfg);
  std::string rep;
  rep += "instance: N = " + std::to_string(cfg.agents) +
         ", D = " + std::to_string(cfg.dim) +
         ", R = " + std::to_string(cfg.resolved_resources()) + "\n";

  const double mono = game::check_strict_monotonicity(prob.game);
  rep += "monotonicity: min eigenvalue of the symmetrized Jacobian = " +
         fmt17(mono) + (mono > 0.0 ? " (strictly monotone)\n" : " (NOT strictly monotone)\n");

  auto slater = game::check_slater(prob.game, prob.constraints);
  rep += "slater: barycenter margin = " + fmt17(slater.margin) +
         (slater.satisfied ? " (strictly feasible)\n"
                           : " (NOT strictly feasible at the barycenter)\n");

  numerics::RngStream stream(cfg.game_seed, 0xB0B0B0B0ull);
  auto bounds = game::compute_bound_constants(prob.game, prob.constraints,
                                              prob.regs, stream);
  rep += "bounds: c1 = " + fmt17(bounds.c1) + ", c2 = " + fmt17(bounds.c2) +
         ", c3 = " + fmt17(bounds.c3) + "\n";

  auto sched_rep = dynamics::validate_schedule(prob.schedule, bounds.c1, 1.0);
  rep += "schedule: gamma0 = " + fmt17(cfg.gamma0) + ", p = " + fmt17(cfg.p) +
         ", alpha = " + fmt17(cfg.alpha) + "\n";
  rep += sched_rep.summary + "\n";
  return rep;
}

}  // namespace maarp::runner
