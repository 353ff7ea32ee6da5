#include "maarp/game.hpp"

#include <cmath>

namespace maarp::game {

namespace {

void require_joint(const QuadraticGameSpec& g, const Eigen::Ref<const Vector>& x,
                   const char* who) {
  if (x.size() != g.joint_dim())
    throw InputError(std::string(who) + ": joint vector length " +
                     std::to_string(x.size()) + " != N*D = " +
                     std::to_string(g.joint_dim()));
}

void require_constraints(const AffineConstraintSpec& cs, Eigen::Index agents,
                         Eigen::Index dim, const char* who) {
  if (Eigen::Index(cs.A.size()) != agents)
    throw InputError(std::string(who) + ": constraint spec has " +
                     std::to_string(cs.A.size()) + " agent blocks, expected " +
                     std::to_string(agents));
  for (const auto& a : cs.A)
    if (a.rows() != cs.resources || a.cols() != dim)
      throw InputError(std::string(who) + ": A block shape mismatch");
  if (cs.b.size() != cs.resources)
    throw InputError(std::string(who) + ": b length mismatch");
}

}  // namespace

AffineConstraintSpec AffineConstraintSpec::identity_scaled(Eigen::Index agents,
                                                           Eigen::Index dim,
                                                           double scale, double d) {
  if (agents < 1 || dim < 1)
    throw InputError("identity_scaled: agents and dim must be >= 1");
  AffineConstraintSpec cs;
  cs.resources = dim;
  cs.A.assign(std::size_t(agents), scale * Matrix::Identity(dim, dim));
  cs.b = Vector::Constant(dim, d);
  return cs;
}

QuadraticGameSpec generate_random_game(Eigen::Index agents, Eigen::Index dim,
                                       RngStream& stream, double c_scale,
                                       double c_offset) {
  if (agents < 1 || dim < 1)
    throw InputError("generate_random_game: agents and dim must be >= 1");
  QuadraticGameSpec g;
  g.agents = agents;
  g.dim = dim;
  Vector entries = numerics::gaussian_vector(stream, dim * dim, 1.0);
  Matrix qt = Eigen::Map<const Matrix>(entries.data(), dim, dim);
  g.Q = 2.0 * numerics::psd_sqrt(qt.transpose() * qt) + Matrix::Identity(dim, dim);
  g.C = c_scale * Matrix::Identity(dim, dim);
  g.c = Matrix::Constant(dim, agents, c_offset);
  return g;
}

Vector sigma_mean(const QuadraticGameSpec& g, const Eigen::Ref<const Vector>& x) {
  require_joint(g, x, "sigma_mean");
  Eigen::Map<const Matrix> blocks(x.data(), g.dim, g.agents);
  return blocks.rowwise().mean();
}

Vector utility_gradient(const QuadraticGameSpec& g, const Eigen::Ref<const Vector>& x) {
  require_joint(g, x, "utility_gradient");
  Eigen::Map<const Matrix> blocks(x.data(), g.dim, g.agents);
  Vector sig = blocks.rowwise().mean();
  Vector csig = g.C * sig;
  Matrix v = g.Q * blocks;
  v += (1.0 / double(g.agents)) * (g.C.transpose() * blocks);
  v.colwise() += csig;
  v += g.c;
  return -Eigen::Map<const Vector>(v.data(), v.size());
}

double agent_loss(const QuadraticGameSpec& g, const Eigen::Ref<const Vector>& x,
                  Eigen::Index agent) {
  require_joint(g, x, "agent_loss");
  if (agent < 0 || agent >= g.agents)
    throw InputError("agent_loss: agent index out of range");
  auto xi = x.segment(agent * g.dim, g.dim);
  Vector sig = sigma_mean(g, x);
  return 0.5 * xi.dot(g.Q * xi) + (g.C * sig + g.c.col(agent)).dot(xi);
}

double average_loss(const QuadraticGameSpec& g, const Eigen::Ref<const Vector>& x) {
  require_joint(g, x, "average_loss");
  Eigen::Map<const Matrix> blocks(x.data(), g.dim, g.agents);
  Vector sig = blocks.rowwise().mean();
  Matrix qx = g.Q * blocks;
  double acc = 0.0;
  Vector csig = g.C * sig;
  for (Eigen::Index i = 0; i < g.agents; ++i)
    acc += 0.5 * blocks.col(i).dot(qx.col(i)) +
           (csig + g.c.col(i)).dot(blocks.col(i));
  return acc / double(g.agents);
}

Vector constraint_eval(const AffineConstraintSpec& cs, const Eigen::Ref<const Vector>& x) {
  if (cs.A.empty()) throw InputError("constraint_eval: empty constraint spec");
  const Eigen::Index dim = cs.A.front().cols();
  const Eigen::Index agents = Eigen::Index(cs.A.size());
  require_constraints(cs, agents, dim, "constraint_eval");
  if (x.size() != agents * dim)
    throw InputError("constraint_eval: joint vector length mismatch");
  Vector g = -cs.b;
  for (Eigen::Index i = 0; i < agents; ++i)
    g += cs.A[std::size_t(i)] * x.segment(i * dim, dim);
  return g;
}

Vector constraint_pullback(const AffineConstraintSpec& cs,
                           const Eigen::Ref<const Vector>& lambda) {
  if (cs.A.empty()) throw InputError("constraint_pullback: empty constraint spec");
  if (lambda.size() != cs.resources)
    throw InputError("constraint_pullback: price vector length mismatch");
  const Eigen::Index dim = cs.A.front().cols();
  const Eigen::Index agents = Eigen::Index(cs.A.size());
  Vector out(agents * dim);
  for (Eigen::Index i = 0; i < agents; ++i)
    out.segment(i * dim, dim) = cs.A[std::size_t(i)].transpose() * lambda;
  return out;
}

ExtendedPoint extended_operator(const QuadraticGameSpec& g,
                                const AffineConstraintSpec& cs,
                                const ExtendedPoint& z) {
  ExtendedPoint out;
  out.x = utility_gradient(g, z.x) - constraint_pullback(cs, z.lambda);
  out.lambda = constraint_eval(cs, z.x);
  return out;
}

double check_strict_monotonicity(const QuadraticGameSpec& g) {
  if (g.Q.rows() != g.dim || g.Q.cols() != g.dim)
    throw InputError("check_strict_monotonicity: Q shape mismatch");
  // The symmetrized Jacobian is block-diagonalized by the eigenbasis of 11^T:
  // the averaging mode sees Q + (1 + 1/N) S, the N-1 difference modes see
  // Q + S/N, where S = (C + C^T)/2.
  const double n = double(g.agents);
  Matrix s = 0.5 * (g.C + g.C.transpose());
  Matrix qs = 0.5 * (g.Q + g.Q.transpose());
  auto mode_mean = numerics::sym_eig(qs + (1.0 + 1.0 / n) * s);
  double lo = mode_mean.values(mode_mean.values.size() - 1);
  if (g.agents > 1) {
    auto mode_diff = numerics::sym_eig(qs + s / n);
    lo = std::min(lo, mode_diff.values(mode_diff.values.size() - 1));
  }
  return lo;
}

SlaterReport check_slater(const QuadraticGameSpec& g, const AffineConstraintSpec& cs) {
  require_constraints(cs, g.agents, g.dim, "check_slater");
  SlaterReport rep;
  rep.point = Vector::Constant(g.joint_dim(), 1.0 / double(g.dim));
  rep.margin = constraint_eval(cs, rep.point).maxCoeff();
  rep.satisfied = rep.margin < 0.0;
  return rep;
}

namespace {

// Operator norm of A_i^T from l2 price space into the agent's dual norm.
double pullback_block_norm(const Matrix& a, numerics::NormKind primal) {
  switch (primal) {
    case numerics::NormKind::l1: {
      // dual is linf: max over coordinates of the l2 norm of A_i's columns
      double m = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) m = std::max(m, a.col(k).norm());
      return m;
    }
    case numerics::NormKind::l2: {
      auto eig = numerics::sym_eig(a.transpose() * a);
      return std::sqrt(std::max(0.0, eig.values(0)));
    }
    case numerics::NormKind::linf: {
      // dual is l1: sqrt(D) times the spectral norm is a valid upper bound
      auto eig = numerics::sym_eig(a.transpose() * a);
      return std::sqrt(double(a.cols())) * std::sqrt(std::max(0.0, eig.values(0)));
    }
  }
  return 0.0;
}

Vector random_joint_simplex(Eigen::Index agents, Eigen::Index dim, RngStream& stream) {
  // Per-agent uniform Dirichlet via normalized exponentials.
  Vector x(agents * dim);
  for (Eigen::Index i = 0; i < agents; ++i) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
      double u = stream.uniform01();
      double e = -std::log(1.0 - u);
      x(i * dim + k) = e;
      sum += e;
    }
    x.segment(i * dim, dim) /= sum;
  }
  return x;
}

Vector random_joint_vertex(Eigen::Index agents, Eigen::Index dim, RngStream& stream) {
  Vector x = Vector::Zero(agents * dim);
  for (Eigen::Index i = 0; i < agents; ++i) {
    auto k = Eigen::Index(stream.next_u64() % std::uint64_t(dim));
    x(i * dim + k) = 1.0;
  }
  return x;
}

}  // namespace

BoundConstants compute_bound_constants(const QuadraticGameSpec& g,
                                       const AffineConstraintSpec& cs,
                                       const std::vector<geometry::Regularizer>& regs,
                                       RngStream& stream, Eigen::Index samples) {
  require_constraints(cs, g.agents, g.dim, "compute_bound_constants");
  if (Eigen::Index(regs.size()) != g.agents)
    throw InputError("compute_bound_constants: one regularizer per agent required");

  BoundConstants out;
  double c1sq = 0.0;
  for (Eigen::Index i = 0; i < g.agents; ++i) {
    double nrm = pullback_block_norm(cs.A[std::size_t(i)],
                                     regs[std::size_t(i)].primal_norm());
    c1sq += nrm * nrm;
  }
  out.c1 = std::sqrt(c1sq);

  numerics::NormSpec dual_spec = geometry::primal_norm_spec(regs);
  auto scan = [&](const Vector& x) {
    out.c2 = std::max(out.c2, numerics::product_norm(utility_gradient(g, x),
                                                     dual_spec, /*dual=*/true));
    out.c3 = std::max(out.c3, constraint_eval(cs, x).norm());
  };

  // The gradient and constraint are affine, so suprema over the product of
  // simplices sit at joint vertices; enumerate them when feasible.
  const double vertex_count = std::pow(double(g.dim), double(g.agents));
  if (vertex_count <= 4096.0) {
    std::vector<Eigen::Index> idx(std::size_t(g.agents), 0);
    Vector x = Vector::Zero(g.joint_dim());
    for (;;) {
      x.setZero();
      for (Eigen::Index i = 0; i < g.agents; ++i)
        x(i * g.dim + idx[std::size_t(i)]) = 1.0;
      scan(x);
      Eigen::Index i = 0;
      while (i < g.agents && ++idx[std::size_t(i)] == g.dim) {
        idx[std::size_t(i)] = 0;
        ++i;
      }
      if (i == g.agents) break;
    }
  } else {
    for (Eigen::Index s = 0; s < samples; ++s)
      scan(random_joint_vertex(g.agents, g.dim, stream));
  }
  for (Eigen::Index s = 0; s < samples; ++s)
    scan(random_joint_simplex(g.agents, g.dim, stream));

  // Sampled validation of the pullback bound.
  for (int s = 0; s < 256; ++s) {
    Vector lam = numerics::gaussian_vector(stream, cs.resources, 1.0).cwiseAbs();
    double lhs = numerics::product_norm(constraint_pullback(cs, lam), dual_spec,
                                        /*dual=*/true);
    if (lhs > out.c1 * lam.norm() * (1.0 + 1e-12))
      throw NumericalError("compute_bound_constants: pullback bound violated", s);
  }
  return out;
}

}  // namespace maarp::game
