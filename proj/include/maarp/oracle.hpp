#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "maarp/errors.hpp"
#include "maarp/game.hpp"

namespace maarp::oracle {

using numerics::Vector;

struct VneSolution {
  Vector x;            // N*D
  Vector lambda;       // R
  double residual = 0.0;
  std::int64_t iterations = 0;
  double lambda_max = 0.0;  // dual box actually used

  void save(const std::string& path) const;
  static VneSolution load(const std::string& path);
};

struct SolveOptions {
  double tol = 1e-8;
  std::int64_t max_iters = 1000000;
  Eigen::Index probe_count = 10000;
  std::uint64_t seed = 0;
  std::optional<game::ExtendedPoint> start;
};

// Variational equilibrium of the constrained game: extragradient on the KKT
// operator over (product of simplices) x (price box [0, lambda_max]^R), with
// exact Euclidean projections throughout. Requires a strictly monotone game
// and a strictly feasible barycenter; terminates only when the successive
// iterate distance is below tol and the equilibrium inequality holds to tol
// on random feasible probes plus unilateral vertex deviations. The price box
// starts at 10 * (sup ||v|| / Slater margin) and doubles when hit.
VneSolution solve_vne(const game::QuadraticGameSpec& g,
                      const game::AffineConstraintSpec& cs,
                      const SolveOptions& opts = {});

// Exhaustive barycentric grid minimizer of ||x - y||^2 over the simplex,
// for D in {2, 3}. D = 3 refines coarse-to-fine, which the convex objective
// keeps exact to within one grid cell. Resolution must be in (0, 1e-4].
Vector brute_simplex_projection(const Eigen::Ref<const Vector>& y,
                                double resolution);

// Central finite differences of the per-agent losses on the joint vector:
// entry (i,k) is -d J_i / d x_{ik}, the reference for the payoff gradient.
Vector finite_diff_gradient(const game::QuadraticGameSpec& g,
                            const Eigen::Ref<const Vector>& x, double h = 1e-6);

// Largest value of <x - candidate, v(candidate)> over feasible probes
// (rejection-sampled joint strategies plus feasible unilateral vertex
// deviations from the candidate). Near zero certifies the candidate;
// clearly positive refutes it.
double grid_vi_check(const game::QuadraticGameSpec& g,
                     const game::AffineConstraintSpec& cs,
                     const Eigen::Ref<const Vector>& candidate,
                     Eigen::Index probe_count = 10000, std::uint64_t seed = 0);

}  // namespace maarp::oracle
