#pragma once

#include <cstdint>
#include <vector>

#include "arpid/common.hpp"

namespace arpid {

/// Implicit n x k sparse sign embedding. Row i has exactly `zeta` nonzeros of
/// value +-1/sqrt(zeta): the j-th one sits in column j*b + block_index(i, j)
/// of the j-th contiguous column block, where b = k / zeta.
class SparseStackEmbedding {
 public:
  Index n() const { return n_; }
  Index k() const { return k_; }
  Index zeta() const { return zeta_; }
  Index block_width() const { return k_ / zeta_; }
  std::uint64_t seed() const { return seed_; }

  int sign(Index row, Index j) const { return signs_[static_cast<std::size_t>(row * zeta_ + j)]; }
  Index block_index(Index row, Index j) const { return blocks_[static_cast<std::size_t>(row * zeta_ + j)]; }
  Index column(Index row, Index j) const { return j * block_width() + block_index(row, j); }
  double value(Index row, Index j) const { return sign(row, j) * scale_; }

  friend SparseStackEmbedding sparsestack_new(Index n, Index k, Index zeta, std::uint64_t seed);

 private:
  Index n_ = 0;
  Index k_ = 0;
  Index zeta_ = 0;
  double scale_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<std::int8_t> signs_;   // n x zeta, row-major
  std::vector<std::int32_t> blocks_;  // n x zeta, row-major, 0-based
};

/// Draws signs and block indices row-major over (row, j), sign first, from an
/// mt19937_64 seeded with `seed`. Throws InvalidSparsity unless zeta divides k.
SparseStackEmbedding sparsestack_new(Index n, Index k, Index zeta, std::uint64_t seed);

/// Convenience overload that takes the seed from one draw of `rng`.
SparseStackEmbedding sparsestack_new(Index n, Index k, Index zeta, Rng& rng);

/// Smallest multiple of zeta that is >= k.
Index round_up_to_multiple(Index k, Index zeta);

/// Explicit sparse form of the embedding, n*zeta nonzeros.
SparseMatrix materialize(const SparseStackEmbedding& emb);

/// A * Omega without materializing Omega. Each output column accumulates its
/// contributions in increasing row order of Omega, the same order a plain dense
/// product uses, so the result is bit-identical to A * materialize(emb).
DenseMatrix apply_right(const DenseMatrix& A, const SparseStackEmbedding& emb);
DenseMatrix apply_right(const SparseMatrix& A, const SparseStackEmbedding& emb);

}  // namespace arpid
