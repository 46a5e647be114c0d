#pragma once

#include "arpid/common.hpp"

namespace arpid {

/// Orthonormal basis for range(B). Full-rank inputs take the blocked Householder
/// path; if a trailing R diagonal falls below kRankTol * ||B||_F the basis is
/// recomputed with column pivoting and only the numerically independent
/// directions are returned, so the result may be narrower than B.
DenseMatrix orth(const DenseMatrix& B);

/// Householder QR factorization of a growing d x k_cur matrix, extended one block
/// of columns at a time. Reflectors are append-only and the orthogonal factor is
/// never formed; every product with it goes through the reflector sequence.
class HouseholderQR {
 public:
  explicit HouseholderQR(Index ambient_dim);

  Index ambient_dim() const { return reflectors_.rows(); }
  Index size() const { return size_; }

  /// Absorb `cols` (d x p) on the right of the factored matrix. Throws
  /// RankDeficientUpdate, leaving the factorization untouched, if a new column is
  /// numerically in the span of the columns before it.
  void append(const DenseMatrix& cols);

  /// Same as append, for columns already multiplied by U_full^T (apply_qt).
  /// Saves re-applying the existing reflectors when the caller has them.
  void append_transformed(const DenseMatrix& qt_cols);

  /// (I - U U^T) M, where U holds the first size() orthonormal columns.
  DenseMatrix project_out(const DenseMatrix& M) const;

  /// U_full^T M and U_full M for the full d x d orthogonal factor.
  DenseMatrix apply_qt(const DenseMatrix& M) const;
  DenseMatrix apply_q(const DenseMatrix& M) const;

  /// Upper-triangular size() x size() factor.
  DenseMatrix r() const;

  /// Reconstruct the absorbed columns as U * [R; 0]. Test/diagnostic helper.
  DenseMatrix reconstruct() const;

 private:
  // Column j keeps the essential part of reflector j below the diagonal.
  DenseMatrix reflectors_;
  Vector tau_;
  DenseMatrix r_;
  Index size_ = 0;
};

/// Empty factorization over R^d; `d` must be at least 1.
HouseholderQR qr_empty(Index d);

/// A * B^+ for a k x n matrix B with k <= n, via a Householder QR of B^T.
/// Throws RankDeficient when B does not have full numerical row rank.
DenseMatrix apply_pinv_right(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix apply_pinv_right(const SparseMatrix& A, const DenseMatrix& B);

/// A * B^+ through a truncated SVD of B (singular values below kRankTol *
/// sigma_max are dropped). Fallback for rank-deficient B.
DenseMatrix apply_pinv_right_svd(const DenseMatrix& A, const DenseMatrix& B);

/// Squared Euclidean norm of every row. For orthonormal Q these are the
/// leverage scores and they sum to Q.cols().
Vector squared_row_norms(const DenseMatrix& Q);

/// rows x cols matrix of iid standard normals, filled column by column.
DenseMatrix gaussian_matrix(Index rows, Index cols, Rng& rng);

/// ||Q^T Q - I||_F.
double orthonormality_defect(const DenseMatrix& Q);

}  // namespace arpid
