#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "maarp/dynamics.hpp"
#include "maarp/errors.hpp"

namespace maarp::metrics {

using numerics::Matrix;
using numerics::Vector;

struct TrajectoryRecord {
  std::int64_t n = 0;
  double gamma = 0.0;
  Vector x;
  Vector y;
  Vector lambda;
  Vector loads;     // g(x)
  double avg_loss = 0.0;
};

// Runs the dynamics and keeps every record_every-th pre-step snapshot
// (indices n = 0, record_every, 2*record_every, ...).
std::vector<TrajectoryRecord> record_trajectory(
    dynamics::AlgorithmKind kind, const game::QuadraticGameSpec& g,
    const game::AffineConstraintSpec& cs, const dynamics::Schedule& sched,
    const dynamics::NoiseModel& noise,
    const std::vector<geometry::Regularizer>& regs, std::int64_t iters,
    numerics::RngStream rng, std::int64_t record_every = 1,
    const dynamics::RunOptions& opts = {});

// Step-weighted running average of a per-step vector series:
//   mean_n = sum_k w_k v_k / sum_k w_k over the steps seen so far.
// Feeding loads with w = gamma gives the cumulative constraint violation;
// feeding strategies gives the ergodic average.
class RunningWeightedMean {
 public:
  void add(double weight, const Eigen::Ref<const Vector>& v);
  const Vector& value() const;
  double weight_sum() const { return wsum_; }
  std::int64_t count() const { return count_; }

 private:
  Vector acc_;
  Vector mean_;
  double wsum_ = 0.0;
  std::int64_t count_ = 0;
};

// Cumulative violation series: row k holds the gamma-weighted average of the
// loads over steps 0..k (signed, not clipped). Requires an unthinned record
// sequence (record n equal to row index).
Matrix cvio(const std::vector<TrajectoryRecord>& records);

enum class ErgodicWeighting { gamma_weighted, uniform };

// Entry k is the averaged joint strategy over steps 0..k.
std::vector<Vector> ergodic_average(const std::vector<TrajectoryRecord>& records,
                                    ErgodicWeighting weighting =
                                        ErgodicWeighting::gamma_weighted);

// Mean clipped violation across resources: sum_r max(g_r, 0) / R.
double rnccv(const Eigen::Ref<const Vector>& loads);

struct DistanceSeries {
  std::vector<double> values;
  bool fenchel = false;  // false when records lack scores and the primal
                         // norm distance ||X - x*|| + ||La - la*|| was used
};

// Per-record Lyapunov distance to (x*, la*): Fenchel couplings from the stored
// scores plus half squared price gap, or the primal-norm fallback.
DistanceSeries distance_series(const std::vector<TrajectoryRecord>& records,
                               const std::vector<geometry::Regularizer>& regs,
                               const Eigen::Ref<const Vector>& x_star,
                               const Eigen::Ref<const Vector>& lambda_star);

struct PercentileBands {
  std::vector<double> levels;
  Vector mean;    // per slot
  Matrix bands;   // levels.size() x slots
};

// Cross-sample mean and percentiles per slot. Percentiles interpolate order
// statistics linearly (level 0 = min, 100 = max, midpoint at 50 for two
// samples). All series must share one length.
PercentileBands percentile_bands(const std::vector<std::vector<double>>& series,
                                 const std::vector<double>& levels);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double coverage = 0.0;      // fraction of in-window slots with value > 0
  std::int64_t points = 0;
};

// Least-squares slope of log(value) against log(n) over n in [lo, hi],
// skipping non-positive values. Fewer than 10 usable points raises
// InputError.
DecayFit decay_fit(const std::vector<std::int64_t>& ns,
                   const std::vector<double>& values, std::int64_t lo,
                   std::int64_t hi);

}  // namespace maarp::metrics
