#include "maarp/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace maarp::geometry {

namespace {

constexpr double kSimplexTol = 1e-12;

void require_finite(const Eigen::Ref<const Vector>& v, const char* who) {
  if (!v.allFinite())
    throw InputError(std::string(who) + ": non-finite input");
}

void require_dim(const Regularizer& reg, const Eigen::Ref<const Vector>& v,
                 const char* who) {
  if (v.size() != reg.dim)
    throw InputError(std::string(who) + ": dimension " + std::to_string(v.size()) +
                     " does not match regularizer dim " + std::to_string(reg.dim));
}

}  // namespace

std::vector<Regularizer> uniform_regularizers(RegularizerKind kind,
                                              Eigen::Index agents,
                                              Eigen::Index dim) {
  if (agents < 1) throw InputError("uniform_regularizers: agents must be >= 1");
  return std::vector<Regularizer>(std::size_t(agents), Regularizer(kind, dim));
}

Vector simplex_check(const Eigen::Ref<const Vector>& x) {
  require_finite(x, "simplex_check");
  if (x.size() == 0) throw InputError("simplex_check: empty vector");
  const double sum = x.sum();
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw InputError("simplex_check: coordinates sum to " + std::to_string(sum));
  if (x.minCoeff() < -kSimplexTol)
    throw InputError("simplex_check: negative coordinate " +
                     std::to_string(x.minCoeff()));
  Vector out = x.cwiseMax(0.0);
  out /= out.sum();
  return out;
}

Vector mirror_map(const Regularizer& reg, const Eigen::Ref<const Vector>& y) {
  require_dim(reg, y, "mirror_map");
  require_finite(y, "mirror_map");
  Vector x(reg.dim);
  if (reg.kind == RegularizerKind::entropy) {
    x = (y.array() - y.maxCoeff()).exp();
  } else {
    // Exact simplex projection: sort descending, find the largest support size
    // whose common shift keeps all kept coordinates positive.
    std::vector<double> u(y.data(), y.data() + y.size());
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    Eigen::Index rho = 0;
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      css += u[std::size_t(k)];
      const double t = (1.0 - css) / double(k + 1);
      if (u[std::size_t(k)] + t > 0.0) {
        rho = k + 1;
        tau = t;
      }
    }
    (void)rho;
    x = (y.array() + tau).max(0.0);
  }
  x /= x.sum();
  return x;
}

double regularizer_value(const Regularizer& reg, const Eigen::Ref<const Vector>& x) {
  require_dim(reg, x, "regularizer_value");
  Vector p = simplex_check(x);
  if (reg.kind == RegularizerKind::euclidean) return 0.5 * p.squaredNorm();
  double v = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) v += p(i) * std::log(p(i));
  return v;
}

double conjugate_value(const Regularizer& reg, const Eigen::Ref<const Vector>& y) {
  require_dim(reg, y, "conjugate_value");
  require_finite(y, "conjugate_value");
  if (reg.kind == RegularizerKind::entropy) {
    const double m = y.maxCoeff();
    return m + std::log((y.array() - m).exp().sum());
  }
  Vector x = mirror_map(reg, y);
  return y.dot(x) - 0.5 * x.squaredNorm();
}

double fenchel_coupling(const Regularizer& reg, const Eigen::Ref<const Vector>& p,
                        const Eigen::Ref<const Vector>& y) {
  return regularizer_value(reg, p) + conjugate_value(reg, y) - y.dot(p);
}

double delta_psi(const Regularizer& reg) {
  if (reg.kind == RegularizerKind::entropy) return std::log(double(reg.dim));
  return 0.5 * (1.0 - 1.0 / double(reg.dim));
}

Vector joint_mirror(const std::vector<Regularizer>& regs,
                    const Eigen::Ref<const Vector>& y) {
  Eigen::Index total = 0;
  for (const auto& r : regs) total += r.dim;
  if (y.size() != total)
    throw InputError("joint_mirror: stacked length mismatch");
  Vector x(total);
  Eigen::Index off = 0;
  for (const auto& r : regs) {
    x.segment(off, r.dim) = mirror_map(r, y.segment(off, r.dim));
    off += r.dim;
  }
  return x;
}

double joint_fenchel(const std::vector<Regularizer>& regs,
                     const Eigen::Ref<const Vector>& p,
                     const Eigen::Ref<const Vector>& y) {
  Eigen::Index total = 0;
  for (const auto& r : regs) total += r.dim;
  if (p.size() != total || y.size() != total)
    throw InputError("joint_fenchel: stacked length mismatch");
  double acc = 0.0;
  Eigen::Index off = 0;
  for (const auto& r : regs) {
    acc += fenchel_coupling(r, p.segment(off, r.dim), y.segment(off, r.dim));
    off += r.dim;
  }
  return acc;
}

double extended_distance(const std::vector<Regularizer>& regs,
                         const Eigen::Ref<const Vector>& x_star,
                         const Eigen::Ref<const Vector>& lambda_star,
                         const Eigen::Ref<const Vector>& y,
                         const Eigen::Ref<const Vector>& lambda) {
  if (lambda.size() != lambda_star.size())
    throw InputError("extended_distance: price dimension mismatch");
  return joint_fenchel(regs, x_star, y) + 0.5 * (lambda - lambda_star).squaredNorm();
}

NormSpec primal_norm_spec(const std::vector<Regularizer>& regs) {
  NormSpec spec;
  spec.kinds.reserve(regs.size());
  spec.block_dims.reserve(regs.size());
  for (const auto& r : regs) {
    spec.kinds.push_back(r.primal_norm());
    spec.block_dims.push_back(r.dim);
  }
  return spec;
}

}  // namespace maarp::geometry
