#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maarp/errors.hpp"
#include "maarp/game.hpp"
#include "maarp/geometry.hpp"
#include "maarp/numerics.hpp"

namespace maarp::dynamics {

using numerics::RngStream;
using numerics::Vector;

// gamma_n = gamma0 / (n+1)^p, alpha_n = alpha_ratio * gamma_n.
struct Schedule {
  double gamma0 = 0.5;
  double p = 0.5;
  double alpha_ratio = 0.0;

  Schedule() = default;
  Schedule(double g0, double exponent, double alpha) {
    if (!(g0 > 0.0)) throw InputError("Schedule: gamma0 must be positive");
    if (!(exponent > 0.0) || exponent > 1.0)
      throw InputError("Schedule: p must lie in (0, 1]");
    if (alpha < 0.0) throw InputError("Schedule: alpha must be >= 0");
    gamma0 = g0;
    p = exponent;
    alpha_ratio = alpha;
  }

  double gamma(std::int64_t n) const { return gamma0 / std::pow(double(n) + 1.0, p); }
  double alpha(std::int64_t n) const { return alpha_ratio * gamma(n); }
};

struct NoiseModel {
  enum class Kind { none, gaussian, product };
  Kind kind = Kind::none;
  double sigma = 0.0;
};

enum class AlgorithmKind { maarp, anarchy, primal_dual, asymmetric_projection };

std::string algorithm_name(AlgorithmKind kind);
AlgorithmKind algorithm_from_name(const std::string& name);

struct SimState {
  std::int64_t n = 0;
  Vector y;        // scores, N*D
  Vector x;        // mirror image of y, maintained in lockstep
  Vector lambda;   // prices, R
  Vector prev_eps; // product-noise memory, lazily initialized
  RngStream rng;
};

struct RunOptions {
  double y0 = 0.0;      // initial score, replicated
  double lambda0 = 0.0; // initial price, replicated
};

SimState init_state(const std::vector<geometry::Regularizer>& regs,
                    Eigen::Index resources, RngStream rng,
                    const RunOptions& opts = {});

// Gradient observation v(x) + M_n under the chosen noise model; draws come
// from state.rng, and the product model keeps the previous shock in
// state.prev_eps (drawing the initial one on first use).
Vector noisy_gradient(const game::QuadraticGameSpec& g,
                      const Eigen::Ref<const Vector>& x, const NoiseModel& noise,
                      SimState& state);

// One simultaneous score/price update: both sides read the pre-step state.
//   Y  <- Y + gamma_n (v_hat - grad g^T Lambda)
//   La <- [La + gamma_n (g(X) - alpha_n La)]_+
void maarp_step(SimState& state, const game::QuadraticGameSpec& g,
                const game::AffineConstraintSpec& cs, const Schedule& sched,
                const NoiseModel& noise,
                const std::vector<geometry::Regularizer>& regs);

// Score update only; prices stay at their initial value and exert no force.
void anarchy_step(SimState& state, const game::QuadraticGameSpec& g,
                  const game::AffineConstraintSpec& cs, const Schedule& sched,
                  const NoiseModel& noise,
                  const std::vector<geometry::Regularizer>& regs);

// maarp without the price-damping term (alpha treated as zero).
void primal_dual_step(SimState& state, const game::QuadraticGameSpec& g,
                      const game::AffineConstraintSpec& cs, const Schedule& sched,
                      const NoiseModel& noise,
                      const std::vector<geometry::Regularizer>& regs);

// Sequential variant: primal update first, then prices react to the
// extrapolated load 2 g(X_{n+1}) - g(X_n).
void asymmetric_projection_step(SimState& state, const game::QuadraticGameSpec& g,
                                const game::AffineConstraintSpec& cs,
                                const Schedule& sched, const NoiseModel& noise,
                                const std::vector<geometry::Regularizer>& regs);

void step(AlgorithmKind kind, SimState& state, const game::QuadraticGameSpec& g,
          const game::AffineConstraintSpec& cs, const Schedule& sched,
          const NoiseModel& noise, const std::vector<geometry::Regularizer>& regs);

// Pre-step snapshot handed to the observer at every iteration n = 0..iters-1.
struct StepView {
  std::int64_t n;
  double gamma;
  const Vector& x;
  const Vector& y;
  const Vector& lambda;
  const Vector& loads;  // g(x)
};

using StepObserver = std::function<void(const StepView&)>;

// Runs `iters` steps from the initial state, invoking the observer with the
// pre-step snapshot before each update, and returns the final state. Raises
// NumericalError (with the iteration index) on non-finite iterates or when
// ||Y||_inf exceeds 1e12.
SimState run(AlgorithmKind kind, const game::QuadraticGameSpec& g,
             const game::AffineConstraintSpec& cs, const Schedule& sched,
             const NoiseModel& noise,
             const std::vector<geometry::Regularizer>& regs, std::int64_t iters,
             RngStream rng, const StepObserver& observer = {},
             const RunOptions& opts = {});

struct ScheduleReport {
  bool step_divergence = false;       // sum gamma_n diverges
  bool step_summability = false;      // sum gamma_n^2 finite
  bool alpha_summability = false;     // sum gamma_n alpha_n finite
  bool alpha_sufficient = false;      // alpha_ratio > 2 c1^2 / K
  std::optional<std::int64_t> trackable_from;  // first n with
                                               // alpha^2 gamma_n^2 + c1^2/K - alpha/2 <= 0
  bool theorem_regime = false;        // summability + trackability both hold
  bool ergodic_regime = false;        // averaged-iterate guarantees apply
  std::string summary;
};

// Checks the step/price schedule against the sufficient conditions for
// last-iterate convergence and for ergodic guarantees, given the pullback
// bound c1 and the regularizer modulus K.
ScheduleReport validate_schedule(const Schedule& sched, double c1, double k_modulus);

}  // namespace maarp::dynamics
