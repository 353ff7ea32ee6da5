#include "maarp/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace maarp::metrics {

std::vector<TrajectoryRecord> record_trajectory(
    dynamics::AlgorithmKind kind, const game::QuadraticGameSpec& g,
    const game::AffineConstraintSpec& cs, const dynamics::Schedule& sched,
    const dynamics::NoiseModel& noise,
    const std::vector<geometry::Regularizer>& regs, std::int64_t iters,
    numerics::RngStream rng, std::int64_t record_every,
    const dynamics::RunOptions& opts) {
  if (record_every < 1) throw InputError("record_trajectory: record_every must be >= 1");
  std::vector<TrajectoryRecord> records;
  records.reserve(std::size_t(iters / record_every + 1));
  auto observer = [&](const dynamics::StepView& v) {
    if (v.n % record_every != 0) return;
    TrajectoryRecord r;
    r.n = v.n;
    r.gamma = v.gamma;
    r.x = v.x;
    r.y = v.y;
    r.lambda = v.lambda;
    r.loads = v.loads;
    r.avg_loss = game::average_loss(g, v.x);
    records.push_back(std::move(r));
  };
  dynamics::run(kind, g, cs, sched, noise, regs, iters, rng, observer, opts);
  return records;
}

void RunningWeightedMean::add(double weight, const Eigen::Ref<const Vector>& v) {
  if (!(weight > 0.0)) throw InputError("RunningWeightedMean: weight must be > 0");
  if (acc_.size() == 0) {
    acc_ = Vector::Zero(v.size());
  } else if (acc_.size() != v.size()) {
    throw InputError("RunningWeightedMean: dimension changed mid-stream");
  }
  acc_ += weight * v;
  wsum_ += weight;
  count_ += 1;
  mean_ = acc_ / wsum_;
}

const Vector& RunningWeightedMean::value() const {
  if (count_ == 0) throw InputError("RunningWeightedMean: no samples");
  return mean_;
}

namespace {

void require_unthinned(const std::vector<TrajectoryRecord>& records, const char* who) {
  for (std::size_t k = 0; k < records.size(); ++k)
    if (records[k].n != std::int64_t(k))
      throw InputError(std::string(who) +
                       ": records must cover every step (record_every = 1)");
}

}  // namespace

Matrix cvio(const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) throw InputError("cvio: no records");
  require_unthinned(records, "cvio");
  const Eigen::Index r = records.front().loads.size();
  Matrix out(Eigen::Index(records.size()), r);
  RunningWeightedMean mean;
  for (std::size_t k = 0; k < records.size(); ++k) {
    mean.add(records[k].gamma, records[k].loads);
    out.row(Eigen::Index(k)) = mean.value().transpose();
  }
  return out;
}

std::vector<Vector> ergodic_average(const std::vector<TrajectoryRecord>& records,
                                    ErgodicWeighting weighting) {
  if (records.empty()) throw InputError("ergodic_average: no records");
  require_unthinned(records, "ergodic_average");
  std::vector<Vector> out;
  out.reserve(records.size());
  RunningWeightedMean mean;
  for (const auto& rec : records) {
    const double w =
        weighting == ErgodicWeighting::gamma_weighted ? rec.gamma : 1.0;
    mean.add(w, rec.x);
    out.push_back(mean.value());
  }
  return out;
}

double rnccv(const Eigen::Ref<const Vector>& loads) {
  if (loads.size() == 0) throw InputError("rnccv: empty loads");
  return loads.cwiseMax(0.0).sum() / double(loads.size());
}

DistanceSeries distance_series(const std::vector<TrajectoryRecord>& records,
                               const std::vector<geometry::Regularizer>& regs,
                               const Eigen::Ref<const Vector>& x_star,
                               const Eigen::Ref<const Vector>& lambda_star) {
  DistanceSeries out;
  if (records.empty()) return out;
  out.fenchel = records.front().y.size() > 0;
  out.values.reserve(records.size());
  numerics::NormSpec primal = geometry::primal_norm_spec(regs);
  for (const auto& rec : records) {
    if (out.fenchel) {
      out.values.push_back(geometry::extended_distance(regs, x_star, lambda_star,
                                                       rec.y, rec.lambda));
    } else {
      out.values.push_back(numerics::product_norm(rec.x - x_star, primal) +
                           (rec.lambda - lambda_star).norm());
    }
  }
  return out;
}

PercentileBands percentile_bands(const std::vector<std::vector<double>>& series,
                                 const std::vector<double>& levels) {
  if (series.empty()) throw InputError("percentile_bands: no series");
  const std::size_t slots = series.front().size();
  for (const auto& s : series)
    if (s.size() != slots)
      throw InputError("percentile_bands: ragged series lengths");
  if (slots == 0) throw InputError("percentile_bands: empty series");
  for (double q : levels)
    if (q < 0.0 || q > 100.0)
      throw InputError("percentile_bands: level outside [0, 100]");

  PercentileBands out;
  out.levels = levels;
  out.mean = Vector::Zero(Eigen::Index(slots));
  out.bands = Matrix::Zero(Eigen::Index(levels.size()), Eigen::Index(slots));
  std::vector<double> column(series.size());
  for (std::size_t t = 0; t < slots; ++t) {
    for (std::size_t s = 0; s < series.size(); ++s) column[s] = series[s][t];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    out.mean(Eigen::Index(t)) = sum / double(column.size());
    for (std::size_t q = 0; q < levels.size(); ++q) {
      const double h = (double(column.size()) - 1.0) * levels[q] / 100.0;
      const auto lo = std::size_t(std::floor(h));
      const double frac = h - double(lo);
      double v = column[lo];
      if (lo + 1 < column.size()) v += frac * (column[lo + 1] - column[lo]);
      out.bands(Eigen::Index(q), Eigen::Index(t)) = v;
    }
  }
  return out;
}

DecayFit decay_fit(const std::vector<std::int64_t>& ns,
                   const std::vector<double>& values, std::int64_t lo,
                   std::int64_t hi) {
  if (ns.size() != values.size())
    throw InputError("decay_fit: index/value length mismatch");
  if (lo < 1 || hi < lo) throw InputError("decay_fit: bad window");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::int64_t in_window = 0, used = 0;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (ns[k] < lo || ns[k] > hi) continue;
    ++in_window;
    if (!(values[k] > 0.0)) continue;
    const double x = std::log(double(ns[k]));
    const double y = std::log(values[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 10)
    throw InputError("decay_fit: fewer than 10 positive values in window (" +
                     std::to_string(used) + ")");
  DecayFit fit;
  const double m = double(used);
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) throw InputError("decay_fit: degenerate abscissa");
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.coverage = double(used) / double(in_window);
  fit.points = used;
  return fit;
}

}  // namespace maarp::metrics
