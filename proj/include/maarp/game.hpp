#pragma once

#include <Eigen/Dense>
#include <vector>

#include "maarp/errors.hpp"
#include "maarp/geometry.hpp"
#include "maarp/numerics.hpp"

namespace maarp::game {

using numerics::Matrix;
using numerics::RngStream;
using numerics::Vector;

// N-player game on a product of D-simplices. Agent i's loss is
//   J_i(x) = <x_i, Q x_i>/2 + <C sigma(x) + c_i, x_i>,
// with sigma(x) the average strategy; payoffs are u_i = -J_i. Joint vectors
// stack agent blocks in order, so x has length N*D.
struct QuadraticGameSpec {
  Eigen::Index agents = 0;  // N
  Eigen::Index dim = 0;     // D
  Matrix Q;                 // D x D, symmetric positive definite
  Matrix C;                 // D x D
  Matrix c;                 // D x N, column i is agent i's offset

  Eigen::Index joint_dim() const { return agents * dim; }
};

// Shared resource constraints g(x) = sum_i A_i x_i - b <= 0.
struct AffineConstraintSpec {
  Eigen::Index resources = 0;  // R
  std::vector<Matrix> A;       // N matrices, each R x D
  Vector b;                    // R

  // A_i = scale * I for every agent (requires R = D), b = d * ones.
  static AffineConstraintSpec identity_scaled(Eigen::Index agents,
                                              Eigen::Index dim, double scale,
                                              double d);
};

struct ExtendedPoint {
  Vector x;       // N*D
  Vector lambda;  // R
};

// Constants entering the step-size/price analysis: c1 bounds the pullback
// (||grad g^T lambda||_* <= c1 ||lambda||_2), c2 bounds the payoff gradient in
// the dual norm, c3 bounds ||g(x)||_2 over the strategy space.
struct BoundConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

struct SlaterReport {
  Vector point;      // probed joint strategy (barycenter)
  double margin;     // max_r g_r(point)
  bool satisfied;    // margin < 0; advisory — a nonnegative barycenter margin
                     // does not prove the feasible set has empty interior
};

// Q = 2 sqrt(Qt^T Qt) + I with Qt i.i.d. standard normal (drawn column-major
// from the stream), C = c_scale * I, constant offset c_offset on every
// coordinate of every agent.
QuadraticGameSpec generate_random_game(Eigen::Index agents, Eigen::Index dim,
                                       RngStream& stream, double c_scale = 4.0,
                                       double c_offset = 0.0);

Vector sigma_mean(const QuadraticGameSpec& g, const Eigen::Ref<const Vector>& x);

// Blockwise payoff gradient v_i(x) = -(Q x_i + C sigma(x) + c_i + C^T x_i / N).
Vector utility_gradient(const QuadraticGameSpec& g, const Eigen::Ref<const Vector>& x);

double agent_loss(const QuadraticGameSpec& g, const Eigen::Ref<const Vector>& x,
                  Eigen::Index agent);
double average_loss(const QuadraticGameSpec& g, const Eigen::Ref<const Vector>& x);

Vector constraint_eval(const AffineConstraintSpec& cs, const Eigen::Ref<const Vector>& x);

// Stacked blocks A_i^T lambda (gradient of <lambda, g(x)> in x).
Vector constraint_pullback(const AffineConstraintSpec& cs,
                           const Eigen::Ref<const Vector>& lambda);

// KKT operator [v(x) - grad g^T lambda; g(x)] on strategy-price pairs.
ExtendedPoint extended_operator(const QuadraticGameSpec& g,
                                const AffineConstraintSpec& cs,
                                const ExtendedPoint& z);

// Smallest eigenvalue of the symmetrized pseudo-gradient Jacobian
//   G = I_N (x) Q + (11^T/N) (x) C + (I_N/N) (x) C^T.
// Positive means -v is strictly monotone (the game admits a unique
// variational equilibrium). Computed exactly through the two D x D
// eigenproblems the Kronecker structure reduces to.
double check_strict_monotonicity(const QuadraticGameSpec& g);

// Evaluates the constraint at the joint barycenter and reports whether it is
// strictly feasible there. Never rejects: callers that need strict
// feasibility act on the report.
SlaterReport check_slater(const QuadraticGameSpec& g, const AffineConstraintSpec& cs);

// c1 analytically from per-agent operator norms matched to each agent's dual
// norm; c2/c3 as sampled maxima over random joint strategies plus simplex
// vertices (enumerated exactly when D^N is small, sampled otherwise). The c1
// bound is re-validated against random price vectors.
BoundConstants compute_bound_constants(const QuadraticGameSpec& g,
                                       const AffineConstraintSpec& cs,
                                       const std::vector<geometry::Regularizer>& regs,
                                       RngStream& stream,
                                       Eigen::Index samples = 10000);

}  // namespace maarp::game
