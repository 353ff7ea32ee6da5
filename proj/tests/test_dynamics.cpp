#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "maarp/dynamics.hpp"
#include "maarp/oracle.hpp"

using namespace maarp;
using dynamics::AlgorithmKind;
using dynamics::NoiseModel;
using dynamics::Schedule;
using dynamics::SimState;
using game::AffineConstraintSpec;
using game::QuadraticGameSpec;
using geometry::RegularizerKind;
using numerics::Matrix;
using numerics::RngStream;
using numerics::Vector;

namespace {

QuadraticGameSpec zero_game(Eigen::Index n, Eigen::Index d) {
  QuadraticGameSpec g;
  g.agents = n;
  g.dim = d;
  g.Q = Matrix::Zero(d, d);
  g.C = Matrix::Zero(d, d);
  g.c = Matrix::Zero(d, n);
  return g;
}

// Scalar reference implementation: plain loops over nested vectors, no Eigen,
// exercised against the library's vectorized step.
struct RefProblem {
  int n = 0, d = 0, r = 0;
  std::vector<std::vector<double>> q, c_mat;            // d x d
  std::vector<std::vector<double>> offs;                // n x d
  std::vector<std::vector<std::vector<double>>> a;      // n x r x d
  std::vector<double> b;                                // r
};

std::vector<double> ref_softmax_joint(const RefProblem& p, const std::vector<double>& y) {
  std::vector<double> x(y.size());
  for (int i = 0; i < p.n; ++i) {
    double mx = y[size_t(i) * p.d];
    for (int k = 1; k < p.d; ++k) mx = std::max(mx, y[size_t(i) * p.d + k]);
    double sum = 0.0;
    for (int k = 0; k < p.d; ++k) {
      x[size_t(i) * p.d + k] = std::exp(y[size_t(i) * p.d + k] - mx);
      sum += x[size_t(i) * p.d + k];
    }
    for (int k = 0; k < p.d; ++k) x[size_t(i) * p.d + k] /= sum;
  }
  return x;
}

std::vector<double> ref_gradient(const RefProblem& p, const std::vector<double>& x) {
  std::vector<double> sig(p.d, 0.0);
  for (int i = 0; i < p.n; ++i)
    for (int k = 0; k < p.d; ++k) sig[k] += x[size_t(i) * p.d + k] / p.n;
  std::vector<double> v(x.size(), 0.0);
  for (int i = 0; i < p.n; ++i) {
    for (int k = 0; k < p.d; ++k) {
      double acc = p.offs[i][k];
      for (int l = 0; l < p.d; ++l) {
        acc += p.q[k][l] * x[size_t(i) * p.d + l];
        acc += p.c_mat[k][l] * sig[l];
        acc += p.c_mat[l][k] * x[size_t(i) * p.d + l] / p.n;
      }
      v[size_t(i) * p.d + k] = -acc;
    }
  }
  return v;
}

std::vector<double> ref_loads(const RefProblem& p, const std::vector<double>& x) {
  std::vector<double> g(p.r);
  for (int rr = 0; rr < p.r; ++rr) {
    double acc = -p.b[rr];
    for (int i = 0; i < p.n; ++i)
      for (int k = 0; k < p.d; ++k) acc += p.a[i][rr][k] * x[size_t(i) * p.d + k];
    g[rr] = acc;
  }
  return g;
}

struct RefState {
  std::vector<double> y, x, lambda;
};

void ref_step(const RefProblem& p, RefState& s, double gamma, double alpha_n,
              bool sequential_dual) {
  std::vector<double> v = ref_gradient(p, s.x);
  std::vector<double> g0 = ref_loads(p, s.x);
  std::vector<double> ynew = s.y;
  for (int i = 0; i < p.n; ++i)
    for (int k = 0; k < p.d; ++k) {
      double pull = 0.0;
      for (int rr = 0; rr < p.r; ++rr) pull += p.a[i][rr][k] * s.lambda[rr];
      ynew[size_t(i) * p.d + k] += gamma * (v[size_t(i) * p.d + k] - pull);
    }
  std::vector<double> xnew = ref_softmax_joint(p, ynew);
  std::vector<double> lnew(p.r);
  if (sequential_dual) {
    std::vector<double> g1 = ref_loads(p, xnew);
    for (int rr = 0; rr < p.r; ++rr)
      lnew[rr] = std::max(0.0, s.lambda[rr] + gamma * (2.0 * g1[rr] - g0[rr]));
  } else {
    for (int rr = 0; rr < p.r; ++rr)
      lnew[rr] = std::max(0.0, s.lambda[rr] + gamma * (g0[rr] - alpha_n * s.lambda[rr]));
  }
  s.y = ynew;
  s.x = xnew;
  s.lambda = lnew;
}

// The same instance expressed for the library.
struct Paired {
  RefProblem ref;
  QuadraticGameSpec g;
  AffineConstraintSpec cs;
};

Paired paired_instance() {
  Paired p;
  p.ref.n = 2;
  p.ref.d = 2;
  p.ref.r = 2;
  p.ref.q = {{2.0, 0.5}, {0.5, 1.0}};
  p.ref.c_mat = {{4.0, 1.0}, {0.0, 3.0}};
  p.ref.offs = {{0.1, -0.2}, {0.3, 0.0}};
  p.ref.a = {{{4.0, 0.0}, {0.0, 4.0}}, {{3.0, 1.0}, {0.0, 2.0}}};
  p.ref.b = {2.0, 2.0};

  p.g.agents = 2;
  p.g.dim = 2;
  p.g.Q = Matrix(2, 2);
  p.g.Q << 2.0, 0.5, 0.5, 1.0;
  p.g.C = Matrix(2, 2);
  p.g.C << 4.0, 1.0, 0.0, 3.0;
  p.g.c = Matrix(2, 2);
  p.g.c << 0.1, 0.3, -0.2, 0.0;

  p.cs.resources = 2;
  Matrix a0(2, 2), a1(2, 2);
  a0 << 4.0, 0.0, 0.0, 4.0;
  a1 << 3.0, 1.0, 0.0, 2.0;
  p.cs.A = {a0, a1};
  p.cs.b = Vector::Constant(2, 2.0);
  return p;
}

}  // namespace

TEST_CASE("Schedule: validation and decay") {
  CHECK_THROWS_AS(Schedule(0.0, 0.5, 1.0), InputError);
  CHECK_THROWS_AS(Schedule(-1.0, 0.5, 1.0), InputError);
  CHECK_THROWS_AS(Schedule(0.5, 0.0, 1.0), InputError);
  CHECK_THROWS_AS(Schedule(0.5, 1.5, 1.0), InputError);
  CHECK_THROWS_AS(Schedule(0.5, 0.5, -0.1), InputError);

  Schedule s(0.5, 0.5, 5.0);
  CHECK(s.gamma(0) == doctest::Approx(0.5));
  CHECK(s.gamma(3) == doctest::Approx(0.25));
  CHECK(s.alpha(3) == doctest::Approx(1.25));
  for (int n = 0; n < 100; ++n) CHECK(s.gamma(n + 1) < s.gamma(n));
}

TEST_CASE("algorithm names round-trip") {
  for (auto kind : {AlgorithmKind::maarp, AlgorithmKind::anarchy,
                    AlgorithmKind::primal_dual, AlgorithmKind::asymmetric_projection})
    CHECK(dynamics::algorithm_from_name(dynamics::algorithm_name(kind)) == kind);
  CHECK_THROWS_AS(dynamics::algorithm_from_name("gradient_descent"), InputError);
}

TEST_CASE("init_state: defaults and overrides") {
  auto regs = geometry::uniform_regularizers(RegularizerKind::entropy, 2, 3);
  SimState s = dynamics::init_state(regs, 4, RngStream(1, 2));
  CHECK(s.n == 0);
  CHECK(s.y.size() == 6);
  CHECK(s.y.norm() == 0.0);
  CHECK(s.lambda.size() == 4);
  CHECK(s.lambda.norm() == 0.0);
  for (int i = 0; i < 6; ++i) CHECK(s.x(i) == doctest::Approx(1.0 / 3.0));

  dynamics::RunOptions opts;
  opts.y0 = 0.7;
  opts.lambda0 = 0.2;
  SimState s2 = dynamics::init_state(regs, 4, RngStream(1, 2), opts);
  CHECK(s2.y(5) == 0.7);
  CHECK(s2.lambda(0) == 0.2);
  for (int i = 0; i < 6; ++i) CHECK(s2.x(i) == doctest::Approx(1.0 / 3.0));

  opts.lambda0 = -0.1;
  CHECK_THROWS_AS(dynamics::init_state(regs, 4, RngStream(1, 2), opts), InputError);
  CHECK_THROWS_AS(dynamics::init_state({}, 4, RngStream(1, 2)), InputError);
}

TEST_CASE("noisy_gradient: exactness, determinism, product chain") {
  RngStream gen(55, 0);
  auto g = game::generate_random_game(2, 3, gen);
  auto regs = geometry::uniform_regularizers(RegularizerKind::entropy, 2, 3);
  SimState s = dynamics::init_state(regs, 3, RngStream(55, 1));
  Vector exact = game::utility_gradient(g, s.x);

  NoiseModel none;
  CHECK((dynamics::noisy_gradient(g, s.x, none, s) - exact).norm() == 0.0);

  NoiseModel mute{NoiseModel::Kind::gaussian, 0.0};
  CHECK((dynamics::noisy_gradient(g, s.x, mute, s) - exact).norm() == 0.0);

  // Gaussian draws replicate the raw stream.
  NoiseModel gauss{NoiseModel::Kind::gaussian, 2.0};
  SimState s1 = dynamics::init_state(regs, 3, RngStream(55, 2));
  RngStream shadow(55, 2);
  Vector got = dynamics::noisy_gradient(g, s1.x, gauss, s1);
  Vector want = exact + numerics::gaussian_vector(shadow, 6, 2.0);
  CHECK(got == want);

  // Product noise: M_n = eps_n .* eps_{n-1} with the initial shock drawn first.
  NoiseModel prod{NoiseModel::Kind::product, 1.5};
  SimState s2 = dynamics::init_state(regs, 3, RngStream(55, 3));
  RngStream shadow2(55, 3);
  Vector e0 = numerics::gaussian_vector(shadow2, 6, 1.5);
  Vector e1 = numerics::gaussian_vector(shadow2, 6, 1.5);
  Vector e2 = numerics::gaussian_vector(shadow2, 6, 1.5);
  Vector o1 = dynamics::noisy_gradient(g, s2.x, prod, s2);
  Vector o2 = dynamics::noisy_gradient(g, s2.x, prod, s2);
  CHECK(o1 == Vector(exact + e1.cwiseProduct(e0)));
  CHECK(o2 == Vector(exact + e2.cwiseProduct(e1)));
}

TEST_CASE("noisy_gradient: gaussian noise is empirically centered") {
  RngStream gen(56, 0);
  auto g = game::generate_random_game(1, 2, gen);
  auto regs = geometry::uniform_regularizers(RegularizerKind::entropy, 1, 2);
  SimState s = dynamics::init_state(regs, 1, RngStream(56, 1));
  Vector exact = game::utility_gradient(g, s.x);
  NoiseModel gauss{NoiseModel::Kind::gaussian, 5.0};
  const int n = 100000;
  Vector acc = Vector::Zero(2);
  for (int i = 0; i < n; ++i) acc += dynamics::noisy_gradient(g, s.x, gauss, s) - exact;
  acc /= double(n);
  CHECK(acc.lpNorm<Eigen::Infinity>() <= 5.0 * 4.0 / std::sqrt(double(n)));
}

TEST_CASE("maarp_step: fixed point of the trivial instance") {
  auto g = zero_game(2, 2);
  AffineConstraintSpec cs;
  cs.resources = 2;
  cs.A.assign(2, Matrix::Zero(2, 2));
  cs.b = Vector::Zero(2);
  auto regs = geometry::uniform_regularizers(RegularizerKind::entropy, 2, 2);
  SimState s = dynamics::init_state(regs, 2, RngStream(0, 0));
  NoiseModel none;
  Schedule sched(0.1, 0.5, 0.5);
  dynamics::maarp_step(s, g, cs, sched, none, regs);
  CHECK(s.n == 1);
  CHECK(s.y.norm() == 0.0);
  CHECK(s.lambda.norm() == 0.0);
  for (int i = 0; i < 4; ++i) CHECK(s.x(i) == doctest::Approx(0.5));
}

TEST_CASE("maarp_step: price clipping at zero, two hand-computed steps") {
  // Zero game keeps X at the uniform point, so the loads are constant (1,-1):
  // A_i = I, b = (0, 2), per-resource load sums the uniform coordinates to 1.
  auto g = zero_game(2, 2);
  AffineConstraintSpec cs;
  cs.resources = 2;
  cs.A.assign(2, Matrix::Identity(2, 2));
  cs.b = Vector(2);
  cs.b << 0.0, 2.0;
  auto regs = geometry::uniform_regularizers(RegularizerKind::entropy, 2, 2);
  SimState s = dynamics::init_state(regs, 2, RngStream(0, 0));
  NoiseModel none;
  Schedule sched(0.1, 1.0, 0.5);

  dynamics::maarp_step(s, g, cs, sched, none, regs);
  // Lambda_1 = clip(0 + 0.1*((1,-1) - 0.05*(0,0))) = (0.1, 0); scores felt
  // lambda_0 = 0, so Y is still zero.
  CHECK(s.lambda(0) == doctest::Approx(0.1));
  CHECK(s.lambda(1) == 0.0);
  CHECK(s.y.norm() == 0.0);

  dynamics::maarp_step(s, g, cs, sched, none, regs);
  // gamma_1 = 0.05, alpha_1 = 0.025:
  //   Lambda_2 = clip((0.1,0) + 0.05*((1,-1) - 0.025*(0.1,0)))
  //            = (0.1 + 0.05*0.9975, 0) = (0.149875, 0)
  //   Y_2 = -0.05 * A^T (0.1, 0) per agent = (-0.005, 0 | -0.005, 0)
  CHECK(s.lambda(0) == doctest::Approx(0.149875).epsilon(1e-14));
  CHECK(s.lambda(1) == 0.0);
  CHECK(s.y(0) == doctest::Approx(-0.005).epsilon(1e-14));
  CHECK(s.y(1) == 0.0);
  CHECK(s.y(2) == doctest::Approx(-0.005).epsilon(1e-14));
}

TEST_CASE("maarp_step and asymmetric_projection_step: scalar reference agreement") {
  Paired p = paired_instance();
  auto regs = geometry::uniform_regularizers(RegularizerKind::entropy, 2, 2);
  NoiseModel none;
  Schedule sched(0.2, 0.75, 1.5);

  dynamics::RunOptions opts;
  opts.lambda0 = 0.3;  // nonzero prices so the pullback term engages at step one

  for (bool sequential : {false, true}) {
    SimState s = dynamics::init_state(regs, 2, RngStream(0, 0), opts);
    RefState ref;
    ref.y.assign(4, 0.0);
    ref.x = ref_softmax_joint(p.ref, ref.y);
    ref.lambda.assign(2, 0.3);

    for (int stepno = 0; stepno < 3; ++stepno) {
      double gamma = sched.gamma(stepno);
      double alpha_n = sched.alpha(stepno);
      ref_step(p.ref, ref, gamma, alpha_n, sequential);
      if (sequential)
        dynamics::asymmetric_projection_step(s, p.g, p.cs, sched, none, regs);
      else
        dynamics::maarp_step(s, p.g, p.cs, sched, none, regs);

      for (int i = 0; i < 4; ++i) {
        CHECK(s.y(i) == doctest::Approx(ref.y[size_t(i)]).epsilon(1e-12));
        CHECK(s.x(i) == doctest::Approx(ref.x[size_t(i)]).epsilon(1e-12));
      }
      for (int r = 0; r < 2; ++r)
        CHECK(s.lambda(r) == doctest::Approx(ref.lambda[size_t(r)]).epsilon(1e-12));
    }
  }
}

TEST_CASE("primal_dual is exactly maarp with alpha zero") {
  Paired p = paired_instance();
  auto regs = geometry::uniform_regularizers(RegularizerKind::entropy, 2, 2);
  NoiseModel gauss{NoiseModel::Kind::gaussian, 1.0};
  Schedule with_damping(0.3, 0.6, 0.0);  // alpha already zero
  Schedule plain(0.3, 0.6, 0.0);

  SimState a = dynamics::init_state(regs, 2, RngStream(7, 11));
  SimState b = dynamics::init_state(regs, 2, RngStream(7, 11));
  for (int n = 0; n < 1000; ++n) {
    dynamics::primal_dual_step(a, p.g, p.cs, plain, gauss, regs);
    dynamics::maarp_step(b, p.g, p.cs, with_damping, gauss, regs);
    REQUIRE(a.y == b.y);
    REQUIRE(a.x == b.x);
    REQUIRE(a.lambda == b.lambda);
  }
}

TEST_CASE("anarchy matches maarp under vanishing constraints") {
  Paired p = paired_instance();
  AffineConstraintSpec inert;
  inert.resources = 2;
  inert.A.assign(2, Matrix::Zero(2, 2));
  inert.b = Vector::Zero(2);
  auto regs = geometry::uniform_regularizers(RegularizerKind::euclidean, 2, 2);
  NoiseModel gauss{NoiseModel::Kind::gaussian, 0.5};
  Schedule sched(0.3, 0.6, 0.0);

  SimState a = dynamics::init_state(regs, 2, RngStream(13, 4));
  SimState b = dynamics::init_state(regs, 2, RngStream(13, 4));
  for (int n = 0; n < 500; ++n) {
    dynamics::anarchy_step(a, p.g, inert, sched, gauss, regs);
    dynamics::maarp_step(b, p.g, inert, sched, gauss, regs);
    REQUIRE(a.y == b.y);
    REQUIRE(a.x == b.x);
  }
}

TEST_CASE("simplex and price positivity hold along every algorithm") {
  Paired p = paired_instance();
  NoiseModel gauss{NoiseModel::Kind::product, 1.0};
  Schedule sched(0.4, 0.55, 2.0);
  for (auto kind : {AlgorithmKind::maarp, AlgorithmKind::anarchy,
                    AlgorithmKind::primal_dual, AlgorithmKind::asymmetric_projection}) {
    for (auto rkind : {RegularizerKind::entropy, RegularizerKind::euclidean}) {
      auto regs = geometry::uniform_regularizers(rkind, 2, 2);
      SimState s = dynamics::init_state(regs, 2, RngStream(3, static_cast<std::uint64_t>(kind)));
      for (int n = 0; n < 200; ++n) {
        dynamics::step(kind, s, p.g, p.cs, sched, gauss, regs);
        CHECK(std::abs(s.x.head(2).sum() - 1.0) <= 1e-10);
        CHECK(std::abs(s.x.tail(2).sum() - 1.0) <= 1e-10);
        CHECK(s.x.minCoeff() >= 0.0);
        CHECK(s.lambda.minCoeff() >= 0.0);
      }
    }
  }
}

TEST_CASE("score blow-up raises NumericalError with the step index") {
  RngStream gen(2, 0);
  auto g = game::generate_random_game(2, 2, gen, 4.0, -1e14);
  auto cs = AffineConstraintSpec::identity_scaled(2, 2, 4.0, 4.5);
  auto regs = geometry::uniform_regularizers(RegularizerKind::entropy, 2, 2);
  SimState s = dynamics::init_state(regs, 2, RngStream(2, 1));
  NoiseModel none;
  Schedule sched(0.5, 0.5, 5.0);
  try {
    dynamics::maarp_step(s, g, cs, sched, none, regs);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.iteration() == 0);
  }
}

TEST_CASE("run: observer cadence, determinism, iteration count") {
  Paired p = paired_instance();
  auto regs = geometry::uniform_regularizers(RegularizerKind::entropy, 2, 2);
  NoiseModel gauss{NoiseModel::Kind::gaussian, 1.0};
  Schedule sched(0.3, 0.6, 1.0);

  std::vector<std::int64_t> seen;
  auto obs = [&](const dynamics::StepView& view) {
    CHECK(view.gamma == doctest::Approx(sched.gamma(view.n)));
    CHECK(view.loads.size() == 2);
    if (view.n == 0) {
      CHECK(view.y.norm() == 0.0);
      for (int i = 0; i < 4; ++i) CHECK(view.x(i) == doctest::Approx(0.5));
    }
    seen.push_back(view.n);
  };
  SimState fin = dynamics::run(AlgorithmKind::maarp, p.g, p.cs, sched, gauss, regs,
                               50, RngStream(21, 0), obs);
  CHECK(fin.n == 50);
  REQUIRE(seen.size() == 50);
  for (std::int64_t i = 0; i < 50; ++i) CHECK(seen[size_t(i)] == i);

  SimState again = dynamics::run(AlgorithmKind::maarp, p.g, p.cs, sched, gauss, regs,
                                 50, RngStream(21, 0));
  CHECK(fin.y == again.y);
  CHECK(fin.lambda == again.lambda);

  SimState one = dynamics::run(AlgorithmKind::anarchy, p.g, p.cs, sched, gauss, regs,
                               1, RngStream(21, 1));
  CHECK(one.n == 1);
}

TEST_CASE("validate_schedule: flags match a brute-force scan") {
  auto brute_first = [](const Schedule& s, double c1, double k,
                        std::int64_t horizon) -> std::optional<std::int64_t> {
    const double a = s.alpha_ratio;
    for (std::int64_t n = 0; n <= horizon; ++n) {
      double gmm = s.gamma(n);
      if (a * a * gmm * gmm + c1 * c1 / k - a / 2.0 <= 0.0) return n;
    }
    return std::nullopt;
  };

  // Comfortably damped schedule: finite onset, all last-iterate flags pass.
  {
    Schedule s(0.5, 0.75, 200.0);
    double c1 = 4.0 * std::sqrt(5.0);
    auto rep = dynamics::validate_schedule(s, c1, 1.0);
    CHECK(rep.step_divergence);
    CHECK(rep.step_summability);
    CHECK(rep.alpha_summability);
    CHECK(rep.alpha_sufficient);
    REQUIRE(rep.trackable_from.has_value());
    CHECK(*rep.trackable_from == *brute_first(s, c1, 1.0, 100000));
    CHECK(rep.theorem_regime);
    CHECK(rep.ergodic_regime);
  }

  // Small alpha with modest pullback: onset at a small index.
  {
    Schedule s(0.5, 0.75, 5.0);
    auto rep = dynamics::validate_schedule(s, 1.0, 1.0);
    REQUIRE(rep.trackable_from.has_value());
    CHECK(*rep.trackable_from == 2);
    CHECK(*rep.trackable_from == *brute_first(s, 1.0, 1.0, 1000));
    CHECK(rep.theorem_regime);
  }

  // p = 1/2 keeps only the averaged-iterate guarantees.
  {
    Schedule s(0.5, 0.5, 200.0);
    auto rep = dynamics::validate_schedule(s, 4.0 * std::sqrt(5.0), 1.0);
    CHECK(rep.step_divergence);
    CHECK_FALSE(rep.step_summability);
    CHECK_FALSE(rep.theorem_regime);
    CHECK(rep.ergodic_regime);
  }

  // Experiment-scale price bound with alpha = 5: damping never strong enough.
  {
    Schedule s(0.5, 0.5, 5.0);
    double c1 = 4.0 * std::sqrt(50.0);
    auto rep = dynamics::validate_schedule(s, c1, 1.0);
    CHECK_FALSE(rep.alpha_sufficient);
    CHECK_FALSE(rep.trackable_from.has_value());
    CHECK_FALSE(brute_first(s, c1, 1.0, 100000).has_value());
    CHECK_FALSE(rep.theorem_regime);
    CHECK(rep.ergodic_regime);
    CHECK(rep.summary.find("outside the last-iterate") != std::string::npos);
  }

  // Degenerate corners.
  {
    Schedule s(0.5, 0.75, 0.0);
    auto free_rep = dynamics::validate_schedule(s, 0.0, 1.0);
    REQUIRE(free_rep.trackable_from.has_value());
    CHECK(*free_rep.trackable_from == 0);
    CHECK(free_rep.theorem_regime);

    auto stuck = dynamics::validate_schedule(s, 1.0, 1.0);
    CHECK_FALSE(stuck.trackable_from.has_value());
  }

  CHECK_THROWS_AS(dynamics::validate_schedule(Schedule(0.5, 0.75, 1.0), -1.0, 1.0),
                  InputError);
  CHECK_THROWS_AS(dynamics::validate_schedule(Schedule(0.5, 0.75, 1.0), 1.0, 0.0),
                  InputError);
}

TEST_CASE("noise-free maarp contracts the Lyapunov distance to the equilibrium") {
  RngStream gen(1234, 0);
  auto g = game::generate_random_game(5, 5, gen);
  auto cs = AffineConstraintSpec::identity_scaled(5, 5, 4.0, 4.5);
  auto sol = oracle::solve_vne(g, cs);

  auto regs = geometry::uniform_regularizers(RegularizerKind::entropy, 5, 5);
  NoiseModel none;
  Schedule sched(0.5, 0.75, 200.0);

  SimState s0 = dynamics::init_state(regs, 5, RngStream(0, 0));
  double f0 = geometry::extended_distance(regs, sol.x, sol.lambda, s0.y, s0.lambda);
  REQUIRE(f0 > 0.0);

  SimState fin = dynamics::run(AlgorithmKind::maarp, g, cs, sched, none, regs,
                               100000, RngStream(0, 0));
  double f_end = geometry::extended_distance(regs, sol.x, sol.lambda, fin.y, fin.lambda);
  CHECK(f_end < 1e-3 * f0);
  CHECK(game::constraint_eval(cs, fin.x).maxCoeff() <= 5e-2);
}
