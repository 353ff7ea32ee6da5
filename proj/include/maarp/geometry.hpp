#pragma once

#include <Eigen/Dense>
#include <vector>

#include "maarp/errors.hpp"
#include "maarp/numerics.hpp"

namespace maarp::geometry {

using numerics::Matrix;
using numerics::NormKind;
using numerics::NormSpec;
using numerics::Vector;

enum class RegularizerKind { entropy, euclidean };

// Strongly convex regularizer on the probability simplex of dimension `dim`.
// Both kinds have modulus K = 1: entropy with respect to l1, half-squared-norm
// with respect to l2.
struct Regularizer {
  RegularizerKind kind = RegularizerKind::entropy;
  Eigen::Index dim = 0;
  double strong_convexity = 1.0;

  Regularizer() = default;
  Regularizer(RegularizerKind k, Eigen::Index d) : kind(k), dim(d) {
    if (d < 1) throw InputError("Regularizer: dim must be >= 1");
  }

  NormKind primal_norm() const {
    return kind == RegularizerKind::entropy ? NormKind::l1 : NormKind::l2;
  }
};

// N copies of the same per-agent regularizer.
std::vector<Regularizer> uniform_regularizers(RegularizerKind kind,
                                              Eigen::Index agents,
                                              Eigen::Index dim);

// Validates x against the simplex (coordinate sum within 1e-12 of one, no
// coordinate below -1e-12) and returns a renormalized copy.
Vector simplex_check(const Eigen::Ref<const Vector>& x);

// Choice map induced by the regularizer: argmax over the simplex of
// <y, x> - psi(x). Entropy gives the softmax (max-subtracted); euclidean gives
// the exact projection (sort-and-threshold). Output is renormalized.
Vector mirror_map(const Regularizer& reg, const Eigen::Ref<const Vector>& y);

// psi(x) for x on the simplex (0 log 0 = 0 for entropy).
double regularizer_value(const Regularizer& reg, const Eigen::Ref<const Vector>& x);

// Convex conjugate psi*(y). Entropy: log-sum-exp; euclidean: evaluated through
// the maximizer, <y, Phi(y)> - psi(Phi(y)).
double conjugate_value(const Regularizer& reg, const Eigen::Ref<const Vector>& y);

// F(p, y) = psi(p) + psi*(y) - <y, p>; nonnegative, zero iff Phi(y) = p.
double fenchel_coupling(const Regularizer& reg, const Eigen::Ref<const Vector>& p,
                        const Eigen::Ref<const Vector>& y);

// Range of psi over the simplex (max minus min): entropy log(dim),
// euclidean (1 - 1/dim)/2 (vertex vs. barycenter).
double delta_psi(const Regularizer& reg);

// Blockwise application over stacked per-agent vectors.
Vector joint_mirror(const std::vector<Regularizer>& regs,
                    const Eigen::Ref<const Vector>& y);
double joint_fenchel(const std::vector<Regularizer>& regs,
                     const Eigen::Ref<const Vector>& p,
                     const Eigen::Ref<const Vector>& y);

// Lyapunov distance of (Y, Lambda) to a primal-dual pair (x_star, lambda_star):
// sum of per-agent Fenchel couplings plus half the squared price gap.
double extended_distance(const std::vector<Regularizer>& regs,
                         const Eigen::Ref<const Vector>& x_star,
                         const Eigen::Ref<const Vector>& lambda_star,
                         const Eigen::Ref<const Vector>& y,
                         const Eigen::Ref<const Vector>& lambda);

// Norm layout matching a stack of per-agent regularizer blocks.
NormSpec primal_norm_spec(const std::vector<Regularizer>& regs);

}  // namespace maarp::geometry
