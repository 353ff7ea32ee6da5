#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "maarp/errors.hpp"

namespace maarp::numerics {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class NormKind { l1, l2, linf };

// Block-structured norm on a stacked vector: one norm kind per block, the
// per-block values composed by an outer l2. The dual norm swaps l1 <-> linf
// and keeps l2; the outer l2 composition is self-dual.
struct NormSpec {
  std::vector<NormKind> kinds;       // one entry per block
  std::vector<Eigen::Index> block_dims;

  NormSpec() = default;
  NormSpec(std::vector<NormKind> k, std::vector<Eigen::Index> dims)
      : kinds(std::move(k)), block_dims(std::move(dims)) {}
  // Same kind replicated across all blocks.
  NormSpec(NormKind k, std::vector<Eigen::Index> dims)
      : kinds(dims.size(), k), block_dims(std::move(dims)) {}

  Eigen::Index total_dim() const {
    Eigen::Index t = 0;
    for (auto d : block_dims) t += d;
    return t;
  }
};

double product_norm(const Eigen::Ref<const Vector>& x, const NormSpec& spec,
                    bool dual = false);

struct SymEig {
  Vector values;   // descending
  Matrix vectors;  // columns, orthonormal, vectors.col(j) pairs with values(j)
};

// Symmetric eigendecomposition. Input must be square and symmetric to within
// 1e-10 (relative to its Frobenius norm); it is symmetrized before factoring.
SymEig sym_eig(const Eigen::Ref<const Matrix>& m);

// Symmetric PSD square root via eigendecomposition. Eigenvalues below -1e-6
// raise InputError; small negatives above that are clamped to zero.
Matrix psd_sqrt(const Eigen::Ref<const Matrix>& m);

// Counter-based splittable stream: output k of stream s under master seed m is
// a pure function of (m, s, k), so replaying any stream is bit-exact and
// streams can be handed to parallel workers in any order.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed), stream_id_(stream_id),
        key_(mix(master_seed ^ mix(stream_id + 0x9E3779B97F4A7C15ull))) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() {
    counter_ += 1;
    return mix(key_ + counter_ * 0x9E3779B97F4A7C15ull);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal pair by Box-Muller; consumes exactly two draws.
  void normal_pair(double& z0, double& z1);

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t master_seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// i.i.d. N(0, sigma^2) vector. sigma = 0 returns zeros and consumes no draws;
// sigma > 0 consumes exactly 2*ceil(dim/2) draws (Box-Muller pairs, the spare
// half of an odd tail pair is discarded). Negative sigma raises InputError.
Vector gaussian_vector(RngStream& stream, Eigen::Index dim, double sigma);

}  // namespace maarp::numerics
