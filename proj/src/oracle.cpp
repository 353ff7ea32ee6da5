#include "maarp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

namespace maarp::oracle {

namespace {

// Exact Euclidean simplex projection by support shrinking (Michelot). Kept
// local so the reference path shares no code with the mirror maps it checks.
Vector project_simplex(const Eigen::Ref<const Vector>& y) {
  const Eigen::Index d = y.size();
  std::vector<bool> active(std::size_t(d), true);
  Eigen::Index support = d;
  double tau = 0.0;
  for (Eigen::Index pass = 0; pass < d; ++pass) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
      if (active[std::size_t(i)]) sum += y(i);
    tau = (sum - 1.0) / double(support);
    Eigen::Index kept = 0;
    bool changed = false;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!active[std::size_t(i)]) continue;
      if (y(i) - tau > 0.0) {
        ++kept;
      } else {
        active[std::size_t(i)] = false;
        changed = true;
      }
    }
    support = kept;
    if (!changed) break;
  }
  Vector x = Vector::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i)
    if (active[std::size_t(i)]) x(i) = y(i) - tau;
  double s = x.sum();
  if (s > 0.0) x /= s;
  return x;
}

Vector project_joint(const game::QuadraticGameSpec& g,
                     const Eigen::Ref<const Vector>& y) {
  Vector x(y.size());
  for (Eigen::Index i = 0; i < g.agents; ++i)
    x.segment(i * g.dim, g.dim) = project_simplex(y.segment(i * g.dim, g.dim));
  return x;
}

Vector random_joint_simplex(Eigen::Index agents, Eigen::Index dim,
                            numerics::RngStream& stream) {
  Vector x(agents * dim);
  for (Eigen::Index i = 0; i < agents; ++i) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
      double e = -std::log(1.0 - stream.uniform01());
      x(i * dim + k) = e;
      sum += e;
    }
    x.segment(i * dim, dim) /= sum;
  }
  return x;
}

std::vector<Vector> feasible_probes(const game::QuadraticGameSpec& g,
                                    const game::AffineConstraintSpec& cs,
                                    Eigen::Index count,
                                    numerics::RngStream& stream) {
  std::vector<Vector> probes;
  probes.reserve(std::size_t(count) + 1);
  Vector bary = Vector::Constant(g.joint_dim(), 1.0 / double(g.dim));
  if (game::constraint_eval(cs, bary).maxCoeff() <= 0.0) probes.push_back(bary);
  const std::int64_t budget = 200 * std::int64_t(count);
  for (std::int64_t t = 0; t < budget && Eigen::Index(probes.size()) < count; ++t) {
    Vector x = random_joint_simplex(g.agents, g.dim, stream);
    if (game::constraint_eval(cs, x).maxCoeff() <= 0.0) probes.push_back(std::move(x));
  }
  if (probes.empty())
    throw OracleError("no feasible probe found; constraint set may be empty");
  return probes;
}

// max over feasible probes and feasible unilateral vertex deviations of
// <x - candidate, v(candidate)>.
double vi_residual(const game::QuadraticGameSpec& g,
                   const game::AffineConstraintSpec& cs,
                   const Eigen::Ref<const Vector>& candidate,
                   const std::vector<Vector>& probes) {
  Vector v = game::utility_gradient(g, candidate);
  double res = -std::numeric_limits<double>::infinity();
  for (const auto& p : probes) res = std::max(res, (p - candidate).dot(v));
  Vector loads = game::constraint_eval(cs, candidate);
  for (Eigen::Index i = 0; i < g.agents; ++i) {
    auto xi = candidate.segment(i * g.dim, g.dim);
    auto vi = v.segment(i * g.dim, g.dim);
    const double base = xi.dot(vi);
    Vector shift = loads - cs.A[std::size_t(i)] * xi;  // loads minus agent i's share
    for (Eigen::Index k = 0; k < g.dim; ++k) {
      if ((shift + cs.A[std::size_t(i)].col(k)).maxCoeff() > 0.0) continue;
      res = std::max(res, vi(k) - base);
    }
  }
  return res;
}

double sampled_lipschitz(const game::QuadraticGameSpec& g,
                         const game::AffineConstraintSpec& cs, double lambda_max,
                         numerics::RngStream& stream) {
  double best = 0.0;
  for (int t = 0; t < 128; ++t) {
    game::ExtendedPoint z1, z2;
    z1.x = random_joint_simplex(g.agents, g.dim, stream);
    z2.x = random_joint_simplex(g.agents, g.dim, stream);
    z1.lambda.resize(cs.resources);
    z2.lambda.resize(cs.resources);
    for (Eigen::Index r = 0; r < cs.resources; ++r) {
      z1.lambda(r) = lambda_max * stream.uniform01();
      z2.lambda(r) = lambda_max * stream.uniform01();
    }
    auto f1 = game::extended_operator(g, cs, z1);
    auto f2 = game::extended_operator(g, cs, z2);
    const double dz = std::sqrt((z1.x - z2.x).squaredNorm() +
                                (z1.lambda - z2.lambda).squaredNorm());
    if (dz < 1e-12) continue;
    const double df = std::sqrt((f1.x - f2.x).squaredNorm() +
                                (f1.lambda - f2.lambda).squaredNorm());
    best = std::max(best, df / dz);
  }
  if (best == 0.0) best = 1.0;
  return best;
}

}  // namespace

VneSolution solve_vne(const game::QuadraticGameSpec& g,
                      const game::AffineConstraintSpec& cs,
                      const SolveOptions& opts) {
  const double mono = game::check_strict_monotonicity(g);
  if (mono <= 0.0)
    throw OracleError("solve_vne: game is not strictly monotone (min eigenvalue " +
                      std::to_string(mono) + ")");
  const game::SlaterReport slater = game::check_slater(g, cs);
  if (!slater.satisfied)
    throw OracleError("solve_vne: barycenter not strictly feasible (margin " +
                      std::to_string(slater.margin) +
                      "); the dual extension needs a Slater point");

  numerics::RngStream stream(opts.seed, 0xFEA51B1Eull);
  // Price box scale: payoff gradient magnitude against the Slater margin.
  double vmax = 0.0;
  for (int t = 0; t < 2000; ++t)
    vmax = std::max(vmax,
                    game::utility_gradient(g, random_joint_simplex(g.agents, g.dim, stream))
                        .norm());
  double lambda_max = 10.0 * vmax / std::max(1e-12, -slater.margin);

  std::vector<Vector> probes = feasible_probes(g, cs, opts.probe_count, stream);

  game::ExtendedPoint z;
  if (opts.start) {
    z = *opts.start;
    if (z.x.size() != g.joint_dim() || z.lambda.size() != cs.resources)
      throw InputError("solve_vne: start point dimension mismatch");
    z.x = project_joint(g, z.x);
  } else {
    z.x = slater.point;
    z.lambda = Vector::Zero(cs.resources);
  }

  VneSolution sol;
  std::int64_t total_iters = 0;
  for (int doubling = 0; doubling < 12; ++doubling) {
    z.lambda = z.lambda.cwiseMin(lambda_max).cwiseMax(0.0);
    const double lip = sampled_lipschitz(g, cs, lambda_max, stream);
    const double tau = std::min(1e-2, 0.5 / lip);
    bool hit_box = false;
    std::int64_t last_check = -1000000;
    for (std::int64_t k = total_iters; k < opts.max_iters; ++k) {
      auto f = game::extended_operator(g, cs, z);
      game::ExtendedPoint zh;
      zh.x = project_joint(g, z.x + tau * f.x);
      zh.lambda = (z.lambda + tau * f.lambda).cwiseMax(0.0).cwiseMin(lambda_max);
      auto fh = game::extended_operator(g, cs, zh);
      game::ExtendedPoint zn;
      zn.x = project_joint(g, z.x + tau * fh.x);
      zn.lambda = (z.lambda + tau * fh.lambda).cwiseMax(0.0).cwiseMin(lambda_max);
      const double dist = std::sqrt((zn.x - z.x).squaredNorm() +
                                    (zn.lambda - z.lambda).squaredNorm());
      z = zn;
      total_iters = k + 1;
      if (dist >= opts.tol) continue;
      if (k - last_check < 200) continue;
      last_check = k;
      if (z.lambda.maxCoeff() > 0.999 * lambda_max) {
        hit_box = true;
        break;
      }
      const double res = vi_residual(g, cs, z.x, probes);
      if (res > opts.tol) continue;
      const double overload = game::constraint_eval(cs, z.x).maxCoeff();
      if (overload > 1e-8) continue;
      const double comp =
          (z.lambda.array() * game::constraint_eval(cs, z.x).array()).abs().maxCoeff();
      if (comp > 1e-6) continue;
      sol.x = z.x;
      sol.lambda = z.lambda;
      sol.residual = res;
      sol.iterations = total_iters;
      sol.lambda_max = lambda_max;
      return sol;
    }
    if (hit_box) {
      lambda_max *= 2.0;
      continue;
    }
    throw OracleError("solve_vne: no convergence within " +
                      std::to_string(opts.max_iters) + " iterations");
  }
  throw OracleError("solve_vne: price box still hit after repeated doubling");
}

void VneSolution::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("VneSolution::save: cannot open " + path);
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  out << "vne 1\n";
  out << "sizes " << x.size() << " " << lambda.size() << "\n";
  out << "lambda_max ";
  put(lambda_max);
  out << "\niterations " << iterations << "\nresidual ";
  put(residual);
  out << "\nx";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out << " ";
    put(x(i));
  }
  out << "\nlambda";
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    out << " ";
    put(lambda(i));
  }
  out << "\n";
  if (!out) throw InputError("VneSolution::save: write failed for " + path);
}

VneSolution VneSolution::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("VneSolution::load: cannot open " + path);
  std::string tag;
  int version = 0;
  in >> tag >> version;
  if (!in || tag != "vne" || version != 1)
    throw InputError("VneSolution::load: bad header in " + path);
  VneSolution sol;
  Eigen::Index nx = 0, nl = 0;
  in >> tag >> nx >> nl;
  if (!in || tag != "sizes" || nx < 1 || nl < 1)
    throw InputError("VneSolution::load: bad sizes in " + path);
  in >> tag >> sol.lambda_max;
  if (!in || tag != "lambda_max") throw InputError("VneSolution::load: bad lambda_max");
  in >> tag >> sol.iterations;
  if (!in || tag != "iterations") throw InputError("VneSolution::load: bad iterations");
  in >> tag >> sol.residual;
  if (!in || tag != "residual") throw InputError("VneSolution::load: bad residual");
  in >> tag;
  if (!in || tag != "x") throw InputError("VneSolution::load: bad x section");
  sol.x.resize(nx);
  for (Eigen::Index i = 0; i < nx; ++i) in >> sol.x(i);
  in >> tag;
  if (!in || tag != "lambda") throw InputError("VneSolution::load: bad lambda section");
  sol.lambda.resize(nl);
  for (Eigen::Index i = 0; i < nl; ++i) in >> sol.lambda(i);
  if (!in) throw InputError("VneSolution::load: truncated file " + path);
  return sol;
}

Vector brute_simplex_projection(const Eigen::Ref<const Vector>& y,
                                double resolution) {
  if (y.size() != 2 && y.size() != 3)
    throw InputError("brute_simplex_projection: only D in {2, 3} supported");
  if (!(resolution > 0.0) || resolution > 1e-4)
    throw InputError("brute_simplex_projection: resolution must be in (0, 1e-4]");
  if (!y.allFinite()) throw InputError("brute_simplex_projection: non-finite input");

  if (y.size() == 2) {
    const auto steps = std::int64_t(std::ceil(1.0 / resolution));
    double best = std::numeric_limits<double>::infinity();
    Vector bx(2);
    for (std::int64_t k = 0; k <= steps; ++k) {
      const double a = std::min(1.0, double(k) * resolution);
      const double d0 = a - y(0), d1 = (1.0 - a) - y(1);
      const double val = d0 * d0 + d1 * d1;
      if (val < best) {
        best = val;
        bx << a, 1.0 - a;
      }
    }
    return bx;
  }

  // D = 3: exhaustive at a coarse step, then exhaustive refinement of the
  // winning neighborhood down to the requested step; the convex objective
  // keeps the continuous minimizer within one cell of each level's winner.
  double step = 1e-2;
  double alo = 0.0, ahi = 1.0, blo = 0.0, bhi = 1.0;
  Vector bx(3);
  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    double ba = 0.0, bb = 0.0;
    const auto na = std::int64_t(std::floor((ahi - alo) / step)) + 1;
    for (std::int64_t i = 0; i <= na; ++i) {
      const double a = std::min(ahi, alo + double(i) * step);
      if (a > 1.0) break;
      for (std::int64_t j = 0;; ++j) {
        const double b = std::min(bhi, blo + double(j) * step);
        if (b > 1.0 - a + 1e-15 || b > bhi + 1e-15) break;
        const double cc = 1.0 - a - b;
        const double d0 = a - y(0), d1 = b - y(1), d2 = cc - y(2);
        const double val = d0 * d0 + d1 * d1 + d2 * d2;
        if (val < best) {
          best = val;
          ba = a;
          bb = b;
        }
        if (b >= bhi) break;
      }
    }
    bx << ba, bb, 1.0 - ba - bb;
    if (step <= resolution) break;
    const double next = std::max(resolution, step / 10.0);
    alo = std::max(0.0, ba - 2.0 * step);
    ahi = std::min(1.0, ba + 2.0 * step);
    blo = std::max(0.0, bb - 2.0 * step);
    bhi = std::min(1.0, bb + 2.0 * step);
    step = next;
  }
  return bx;
}

Vector finite_diff_gradient(const game::QuadraticGameSpec& g,
                            const Eigen::Ref<const Vector>& x, double h) {
  if (h < 1e-8 || h > 1e-4)
    throw InputError("finite_diff_gradient: h must lie in [1e-8, 1e-4]");
  if (x.size() != g.joint_dim())
    throw InputError("finite_diff_gradient: joint vector length mismatch");
  Vector out(x.size());
  Vector xp = x, xm = x;
  for (Eigen::Index i = 0; i < g.agents; ++i) {
    for (Eigen::Index k = 0; k < g.dim; ++k) {
      const Eigen::Index idx = i * g.dim + k;
      xp(idx) = x(idx) + h;
      xm(idx) = x(idx) - h;
      out(idx) = -(game::agent_loss(g, xp, i) - game::agent_loss(g, xm, i)) / (2.0 * h);
      xp(idx) = x(idx);
      xm(idx) = x(idx);
    }
  }
  return out;
}

double grid_vi_check(const game::QuadraticGameSpec& g,
                     const game::AffineConstraintSpec& cs,
                     const Eigen::Ref<const Vector>& candidate,
                     Eigen::Index probe_count, std::uint64_t seed) {
  if (candidate.size() != g.joint_dim())
    throw InputError("grid_vi_check: candidate length mismatch");
  for (Eigen::Index i = 0; i < g.agents; ++i) {
    auto xi = candidate.segment(i * g.dim, g.dim);
    if (std::abs(xi.sum() - 1.0) > 1e-9 || xi.minCoeff() < -1e-9)
      throw InputError("grid_vi_check: candidate block " + std::to_string(i) +
                       " is not a simplex point");
  }
  numerics::RngStream stream(seed, 0x6811DC4Eull);
  std::vector<Vector> probes = feasible_probes(g, cs, probe_count, stream);
  return vi_residual(g, cs, candidate, probes);
}

}  // namespace maarp::oracle
