#include "maarp/numerics.hpp"

#include <cmath>
#include <numbers>

namespace maarp::numerics {

double product_norm(const Eigen::Ref<const Vector>& x, const NormSpec& spec,
                    bool dual) {
  if (spec.kinds.size() != spec.block_dims.size())
    throw InputError("product_norm: kinds/block_dims size mismatch");
  if (spec.total_dim() != x.size())
    throw InputError("product_norm: vector length " + std::to_string(x.size()) +
                     " does not match block dims total " +
                     std::to_string(spec.total_dim()));
  double acc = 0.0;
  Eigen::Index off = 0;
  for (std::size_t b = 0; b < spec.kinds.size(); ++b) {
    const auto d = spec.block_dims[b];
    if (d <= 0) throw InputError("product_norm: non-positive block dim");
    auto seg = x.segment(off, d);
    NormKind k = spec.kinds[b];
    if (dual) {
      if (k == NormKind::l1) k = NormKind::linf;
      else if (k == NormKind::linf) k = NormKind::l1;
    }
    double v = 0.0;
    switch (k) {
      case NormKind::l1: v = seg.lpNorm<1>(); break;
      case NormKind::l2: v = seg.norm(); break;
      case NormKind::linf: v = seg.lpNorm<Eigen::Infinity>(); break;
    }
    acc += v * v;
    off += d;
  }
  return std::sqrt(acc);
}

SymEig sym_eig(const Eigen::Ref<const Matrix>& m) {
  if (m.rows() != m.cols())
    throw InputError("sym_eig: matrix is not square (" + std::to_string(m.rows()) +
                     "x" + std::to_string(m.cols()) + ")");
  const double scale = 1.0 + m.norm();
  const double asym = (m - m.transpose()).norm();
  if (asym > 1e-10 * scale)
    throw InputError("sym_eig: input not symmetric (asymmetry " +
                     std::to_string(asym) + ")");
  Matrix s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success)
    throw InputError("sym_eig: eigendecomposition failed");
  SymEig out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

Matrix psd_sqrt(const Eigen::Ref<const Matrix>& m) {
  SymEig eig = sym_eig(m);
  Vector v = eig.values;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) < -1e-6)
      throw InputError("psd_sqrt: matrix not PSD (eigenvalue " +
                       std::to_string(v(i)) + ")");
    v(i) = v(i) > 0.0 ? std::sqrt(v(i)) : 0.0;
  }
  Matrix s = eig.vectors * v.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (s + s.transpose());
}

void RngStream::normal_pair(double& z0, double& z1) {
  // u in (0,1] for the log, [0,1) for the angle.
  const double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = double(next_u64() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  z0 = r * std::cos(t);
  z1 = r * std::sin(t);
}

Vector gaussian_vector(RngStream& stream, Eigen::Index dim, double sigma) {
  if (dim < 0) throw InputError("gaussian_vector: negative dimension");
  if (sigma < 0.0) throw InputError("gaussian_vector: negative sigma");
  Vector out = Vector::Zero(dim);
  if (sigma == 0.0) return out;
  for (Eigen::Index i = 0; i < dim; i += 2) {
    double z0, z1;
    stream.normal_pair(z0, z1);
    out(i) = sigma * z0;
    if (i + 1 < dim) out(i + 1) = sigma * z1;
  }
  return out;
}

}  // namespace maarp::numerics
