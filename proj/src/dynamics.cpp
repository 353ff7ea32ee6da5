#include "maarp/dynamics.hpp"

#include <cmath>

namespace maarp::dynamics {

namespace {

constexpr double kScoreCap = 1e12;

void guard(const SimState& state) {
  if (!state.y.allFinite() || !state.lambda.allFinite())
    throw NumericalError("dynamics: non-finite iterate", state.n);
  if (state.y.lpNorm<Eigen::Infinity>() > kScoreCap)
    throw NumericalError("dynamics: score blow-up beyond 1e12", state.n);
}

// Shared cores taking the pre-step loads so run() can evaluate g(X_n) once
// per iteration for both the observer and the update.

void advance_maarp(SimState& s, const game::QuadraticGameSpec& g,
                   const game::AffineConstraintSpec& cs, const Schedule& sched,
                   const NoiseModel& noise,
                   const std::vector<geometry::Regularizer>& regs,
                   const Vector& loads, bool augmented) {
  const double gamma = sched.gamma(s.n);
  Vector vhat = noisy_gradient(g, s.x, noise, s);
  s.y += gamma * (vhat - game::constraint_pullback(cs, s.lambda));
  if (augmented) {
    const double alpha = sched.alpha(s.n);
    s.lambda = (s.lambda + gamma * (loads - alpha * s.lambda)).cwiseMax(0.0);
  } else {
    s.lambda = (s.lambda + gamma * loads).cwiseMax(0.0);
  }
  s.x = geometry::joint_mirror(regs, s.y);
  guard(s);  // report the index of the step that produced the blow-up
  s.n += 1;
}

void advance_anarchy(SimState& s, const game::QuadraticGameSpec& g,
                     const Schedule& sched, const NoiseModel& noise,
                     const std::vector<geometry::Regularizer>& regs) {
  const double gamma = sched.gamma(s.n);
  Vector vhat = noisy_gradient(g, s.x, noise, s);
  s.y += gamma * vhat;
  s.x = geometry::joint_mirror(regs, s.y);
  guard(s);
  s.n += 1;
}

void advance_ap(SimState& s, const game::QuadraticGameSpec& g,
                const game::AffineConstraintSpec& cs, const Schedule& sched,
                const NoiseModel& noise,
                const std::vector<geometry::Regularizer>& regs,
                const Vector& loads) {
  const double gamma = sched.gamma(s.n);
  Vector vhat = noisy_gradient(g, s.x, noise, s);
  s.y += gamma * (vhat - game::constraint_pullback(cs, s.lambda));
  s.x = geometry::joint_mirror(regs, s.y);
  Vector loads_next = game::constraint_eval(cs, s.x);
  s.lambda = (s.lambda + gamma * (2.0 * loads_next - loads)).cwiseMax(0.0);
  guard(s);
  s.n += 1;
}

void advance(AlgorithmKind kind, SimState& s, const game::QuadraticGameSpec& g,
             const game::AffineConstraintSpec& cs, const Schedule& sched,
             const NoiseModel& noise,
             const std::vector<geometry::Regularizer>& regs, const Vector& loads) {
  switch (kind) {
    case AlgorithmKind::maarp:
      advance_maarp(s, g, cs, sched, noise, regs, loads, /*augmented=*/true);
      break;
    case AlgorithmKind::primal_dual:
      advance_maarp(s, g, cs, sched, noise, regs, loads, /*augmented=*/false);
      break;
    case AlgorithmKind::anarchy:
      advance_anarchy(s, g, sched, noise, regs);
      break;
    case AlgorithmKind::asymmetric_projection:
      advance_ap(s, g, cs, sched, noise, regs, loads);
      break;
  }
}

}  // namespace

std::string algorithm_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::maarp: return "maarp";
    case AlgorithmKind::anarchy: return "anarchy";
    case AlgorithmKind::primal_dual: return "primal_dual";
    case AlgorithmKind::asymmetric_projection: return "asymmetric_projection";
  }
  throw InputError("algorithm_name: unknown kind");
}

AlgorithmKind algorithm_from_name(const std::string& name) {
  if (name == "maarp") return AlgorithmKind::maarp;
  if (name == "anarchy") return AlgorithmKind::anarchy;
  if (name == "primal_dual") return AlgorithmKind::primal_dual;
  if (name == "asymmetric_projection") return AlgorithmKind::asymmetric_projection;
  throw InputError("unknown algorithm '" + name + "'");
}

SimState init_state(const std::vector<geometry::Regularizer>& regs,
                    Eigen::Index resources, RngStream rng, const RunOptions& opts) {
  if (regs.empty()) throw InputError("init_state: no regularizers");
  if (resources < 1) throw InputError("init_state: resources must be >= 1");
  if (opts.lambda0 < 0.0) throw InputError("init_state: lambda0 must be >= 0");
  Eigen::Index total = 0;
  for (const auto& r : regs) total += r.dim;
  SimState s;
  s.y = Vector::Constant(total, opts.y0);
  s.x = geometry::joint_mirror(regs, s.y);
  s.lambda = Vector::Constant(resources, opts.lambda0);
  s.rng = rng;
  return s;
}

Vector noisy_gradient(const game::QuadraticGameSpec& g,
                      const Eigen::Ref<const Vector>& x, const NoiseModel& noise,
                      SimState& state) {
  Vector v = game::utility_gradient(g, x);
  switch (noise.kind) {
    case NoiseModel::Kind::none:
      break;
    case NoiseModel::Kind::gaussian:
      v += numerics::gaussian_vector(state.rng, v.size(), noise.sigma);
      break;
    case NoiseModel::Kind::product: {
      if (state.prev_eps.size() == 0)
        state.prev_eps = numerics::gaussian_vector(state.rng, v.size(), noise.sigma);
      Vector eps = numerics::gaussian_vector(state.rng, v.size(), noise.sigma);
      v += eps.cwiseProduct(state.prev_eps);
      state.prev_eps = std::move(eps);
      break;
    }
  }
  return v;
}

void maarp_step(SimState& state, const game::QuadraticGameSpec& g,
                const game::AffineConstraintSpec& cs, const Schedule& sched,
                const NoiseModel& noise,
                const std::vector<geometry::Regularizer>& regs) {
  Vector loads = game::constraint_eval(cs, state.x);
  advance_maarp(state, g, cs, sched, noise, regs, loads, /*augmented=*/true);
}

void anarchy_step(SimState& state, const game::QuadraticGameSpec& g,
                  const game::AffineConstraintSpec& cs, const Schedule& sched,
                  const NoiseModel& noise,
                  const std::vector<geometry::Regularizer>& regs) {
  (void)cs;
  advance_anarchy(state, g, sched, noise, regs);
}

void primal_dual_step(SimState& state, const game::QuadraticGameSpec& g,
                      const game::AffineConstraintSpec& cs, const Schedule& sched,
                      const NoiseModel& noise,
                      const std::vector<geometry::Regularizer>& regs) {
  Vector loads = game::constraint_eval(cs, state.x);
  advance_maarp(state, g, cs, sched, noise, regs, loads, /*augmented=*/false);
}

void asymmetric_projection_step(SimState& state, const game::QuadraticGameSpec& g,
                                const game::AffineConstraintSpec& cs,
                                const Schedule& sched, const NoiseModel& noise,
                                const std::vector<geometry::Regularizer>& regs) {
  Vector loads = game::constraint_eval(cs, state.x);
  advance_ap(state, g, cs, sched, noise, regs, loads);
}

void step(AlgorithmKind kind, SimState& state, const game::QuadraticGameSpec& g,
          const game::AffineConstraintSpec& cs, const Schedule& sched,
          const NoiseModel& noise, const std::vector<geometry::Regularizer>& regs) {
  Vector loads = game::constraint_eval(cs, state.x);
  advance(kind, state, g, cs, sched, noise, regs, loads);
}

SimState run(AlgorithmKind kind, const game::QuadraticGameSpec& g,
             const game::AffineConstraintSpec& cs, const Schedule& sched,
             const NoiseModel& noise,
             const std::vector<geometry::Regularizer>& regs, std::int64_t iters,
             RngStream rng, const StepObserver& observer, const RunOptions& opts) {
  if (iters < 0) throw InputError("run: iters must be >= 0");
  if (Eigen::Index(regs.size()) != g.agents)
    throw InputError("run: one regularizer per agent required");
  if (noise.sigma < 0.0) throw InputError("run: noise sigma must be >= 0");
  SimState s = init_state(regs, cs.resources, rng, opts);
  for (std::int64_t n = 0; n < iters; ++n) {
    Vector loads = game::constraint_eval(cs, s.x);
    if (observer)
      observer(StepView{n, sched.gamma(n), s.x, s.y, s.lambda, loads});
    advance(kind, s, g, cs, sched, noise, regs, loads);
  }
  return s;
}

ScheduleReport validate_schedule(const Schedule& sched, double c1, double k_modulus) {
  if (c1 < 0.0) throw InputError("validate_schedule: c1 must be >= 0");
  if (!(k_modulus > 0.0)) throw InputError("validate_schedule: K must be > 0");
  ScheduleReport rep;
  rep.step_divergence = sched.p <= 1.0;
  rep.step_summability = sched.p > 0.5;
  rep.alpha_summability = sched.p > 0.5;  // sum gamma alpha = alpha_ratio * sum gamma^2
  rep.ergodic_regime = true;              // any p in (0,1]: tau_n -> inf, gamma_n/tau_n -> 0

  const double alpha = sched.alpha_ratio;
  const double slack = 0.5 * alpha - c1 * c1 / k_modulus;
  rep.alpha_sufficient = slack > 0.0;
  if (alpha == 0.0) {
    // 0 + c1^2/K <= 0 only in the unconstrained-pullback case c1 = 0.
    if (c1 == 0.0) rep.trackable_from = 0;
  } else if (slack > 0.0) {
    // alpha^2 gamma_n^2 <= slack  <=>  gamma_n <= sqrt(slack)/alpha.
    const double gcap = std::sqrt(slack) / alpha;
    if (sched.gamma0 <= gcap) {
      rep.trackable_from = 0;
    } else {
      const double n0 = std::ceil(std::pow(sched.gamma0 / gcap, 1.0 / sched.p) - 1.0);
      rep.trackable_from = std::int64_t(n0);
    }
  }
  rep.theorem_regime = rep.step_divergence && rep.step_summability &&
                       rep.alpha_summability && rep.trackable_from.has_value();

  std::string s;
  s += rep.step_divergence ? "sum(gamma) diverges; " : "sum(gamma) finite (p > 1); ";
  s += rep.step_summability ? "sum(gamma^2) finite; " : "sum(gamma^2) diverges (p <= 1/2); ";
  s += rep.alpha_sufficient
           ? "alpha exceeds 2*c1^2/K; "
           : "alpha below the sufficient level 2*c1^2/K = " +
                 std::to_string(2.0 * c1 * c1 / k_modulus) + "; ";
  if (rep.trackable_from)
    s += "price damping trackable from n = " + std::to_string(*rep.trackable_from) + ". ";
  else
    s += "damping condition alpha^2 gamma_n^2 + c1^2/K <= alpha/2 never holds. ";
  s += rep.theorem_regime
           ? "Schedule satisfies the last-iterate sufficient conditions."
           : "Schedule runs outside the last-iterate sufficient conditions; "
             "only averaged-iterate guarantees apply.";
  rep.summary = s;
  return rep;
}

}  // namespace maarp::dynamics
