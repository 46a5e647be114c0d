#include "arpid/sketch.hpp"

#include <cmath>

namespace arpid {

Index round_up_to_multiple(Index k, Index zeta) { return ((k + zeta - 1) / zeta) * zeta; }

SparseStackEmbedding sparsestack_new(Index n, Index k, Index zeta, std::uint64_t seed) {
  if (n < 1 || k < 1 || zeta < 1) throw Error(ErrorKind::InvalidParam, "sparsestack_new: n, k and zeta must be positive");
  if (zeta > k || k % zeta != 0) {
    throw Error(ErrorKind::InvalidSparsity,
                "sparsestack_new: zeta=" + std::to_string(zeta) + " must divide k=" + std::to_string(k));
  }
  SparseStackEmbedding emb;
  emb.n_ = n;
  emb.k_ = k;
  emb.zeta_ = zeta;
  emb.scale_ = 1.0 / std::sqrt(static_cast<double>(zeta));
  emb.seed_ = seed;
  const auto count = static_cast<std::size_t>(n * zeta);
  emb.signs_.resize(count);
  emb.blocks_.resize(count);

  Rng rng(seed);
  const Index b = k / zeta;
  for (std::size_t e = 0; e < count; ++e) {
    emb.signs_[e] = (rng() >> 63) ? 1 : -1;
    emb.blocks_[e] = static_cast<std::int32_t>(uniform_index(rng, b));
  }
  return emb;
}

SparseStackEmbedding sparsestack_new(Index n, Index k, Index zeta, Rng& rng) {
  return sparsestack_new(n, k, zeta, static_cast<std::uint64_t>(rng()));
}

SparseMatrix materialize(const SparseStackEmbedding& emb) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(emb.n() * emb.zeta()));
  for (Index i = 0; i < emb.n(); ++i) {
    for (Index j = 0; j < emb.zeta(); ++j) entries.emplace_back(i, emb.column(i, j), emb.value(i, j));
  }
  SparseMatrix omega(emb.n(), emb.k());
  omega.setFromTriplets(entries.begin(), entries.end());
  return omega;
}

DenseMatrix apply_right(const DenseMatrix& A, const SparseStackEmbedding& emb) {
  if (A.cols() != emb.n()) throw Error(ErrorKind::DimensionMismatch, "apply_right: A.cols() != embedding input dimension");
  DenseMatrix out = DenseMatrix::Zero(A.rows(), emb.k());
  for (Index i = 0; i < emb.n(); ++i) {
    for (Index j = 0; j < emb.zeta(); ++j) out.col(emb.column(i, j)) += emb.value(i, j) * A.col(i);
  }
  return out;
}

DenseMatrix apply_right(const SparseMatrix& A, const SparseStackEmbedding& emb) {
  if (A.cols() != emb.n()) throw Error(ErrorKind::DimensionMismatch, "apply_right: A.cols() != embedding input dimension");
  DenseMatrix out = DenseMatrix::Zero(A.rows(), emb.k());
  for (Index i = 0; i < emb.n(); ++i) {
    for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
      for (Index j = 0; j < emb.zeta(); ++j) out(it.row(), emb.column(i, j)) += it.value() * emb.value(i, j);
    }
  }
  return out;
}

}  // namespace arpid
