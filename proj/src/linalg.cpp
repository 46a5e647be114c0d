#include "arpid/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Householder>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace arpid {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::RankDeficientUpdate: return "RankDeficientUpdate";
    case ErrorKind::InvalidSparsity: return "InvalidSparsity";
    case ErrorKind::NotOrthonormal: return "NotOrthonormal";
    case ErrorKind::MaxRoundsExceeded: return "MaxRoundsExceeded";
    case ErrorKind::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::RaggedTable: return "RaggedTable";
  }
  return "Unknown";
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix_seed(mix_seed(master ^ h) + index);
}

namespace {

DenseMatrix thin_q(const Eigen::HouseholderQR<DenseMatrix>& qr, Index cols) {
  DenseMatrix Q = DenseMatrix::Identity(qr.rows(), cols);
  qr.householderQ().applyThisOnTheLeft(Q);
  return Q;
}

DenseMatrix orth_pivoted(const DenseMatrix& B, double tol) {
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(B);
  const Index steps = std::min(B.rows(), B.cols());
  Index rank = 0;
  // Column pivoting makes |R(i,i)| non-increasing.
  while (rank < steps && std::abs(qr.matrixQR()(rank, rank)) >= tol) ++rank;
  DenseMatrix Q = DenseMatrix::Identity(B.rows(), rank);
  qr.householderQ().setLength(rank).applyThisOnTheLeft(Q);
  return Q;
}

}  // namespace

DenseMatrix orth(const DenseMatrix& B) {
  if (B.cols() == 0) throw Error(ErrorKind::EmptyMatrix, "orth: input has no columns");
  const double tol = kRankTol * B.norm();
  if (B.rows() < B.cols()) return orth_pivoted(B, tol);

  Eigen::HouseholderQR<DenseMatrix> qr(B);
  const auto& packed = qr.matrixQR();
  for (Index i = 0; i < B.cols(); ++i) {
    if (!(std::abs(packed(i, i)) >= tol)) return orth_pivoted(B, tol);
  }
  return thin_q(qr, B.cols());
}

// ---------------------------------------------------------------------------
// HouseholderQR

HouseholderQR::HouseholderQR(Index ambient_dim)
    : reflectors_(ambient_dim, 0), tau_(0), r_(0, 0) {
  if (ambient_dim < 1) throw Error(ErrorKind::InvalidParam, "HouseholderQR: ambient dimension must be >= 1");
}

HouseholderQR qr_empty(Index d) { return HouseholderQR(d); }

DenseMatrix HouseholderQR::apply_qt(const DenseMatrix& M) const {
  if (M.rows() != ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "HouseholderQR: operand has wrong row count");
  }
  DenseMatrix X = M;
  if (size_ == 0) return X;
  Eigen::householderSequence(reflectors_.leftCols(size_), tau_.head(size_))
      .transpose()
      .applyThisOnTheLeft(X);
  return X;
}

DenseMatrix HouseholderQR::apply_q(const DenseMatrix& M) const {
  if (M.rows() != ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "HouseholderQR: operand has wrong row count");
  }
  DenseMatrix X = M;
  if (size_ == 0) return X;
  Eigen::householderSequence(reflectors_.leftCols(size_), tau_.head(size_)).applyThisOnTheLeft(X);
  return X;
}

DenseMatrix HouseholderQR::project_out(const DenseMatrix& M) const {
  DenseMatrix X = apply_qt(M);
  if (size_ == 0) return X;
  X.topRows(size_).setZero();
  return apply_q(X);
}

void HouseholderQR::append(const DenseMatrix& cols) {
  if (cols.rows() != ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "qr_update: new columns have wrong row count");
  }
  if (cols.cols() == 0) return;
  append_transformed(apply_qt(cols));
}

void HouseholderQR::append_transformed(const DenseMatrix& X) {
  const Index d = ambient_dim();
  const Index p = X.cols();
  if (X.rows() != d) throw Error(ErrorKind::DimensionMismatch, "qr_update: new columns have wrong row count");
  if (size_ + p > d) throw Error(ErrorKind::DimensionMismatch, "qr_update: more columns than the ambient dimension");
  if (p == 0) return;

  Eigen::HouseholderQR<DenseMatrix> block_qr(X.bottomRows(d - size_));
  const auto& packed = block_qr.matrixQR();
  for (Index j = 0; j < p; ++j) {
    // The transform is orthogonal, so this is the norm of the original column.
    const double scale = X.col(j).norm();
    if (!(std::abs(packed(j, j)) >= kRankTol * scale) || scale == 0.0) {
      throw Error(ErrorKind::RankDeficientUpdate,
                  "qr_update: column " + std::to_string(j) + " lies in the span of the absorbed columns");
    }
  }

  const Index new_size = size_ + p;
  reflectors_.conservativeResize(d, new_size);
  tau_.conservativeResize(new_size);
  reflectors_.block(size_, size_, d - size_, p) = packed;
  tau_.segment(size_, p) = block_qr.hCoeffs();

  DenseMatrix r_new = DenseMatrix::Zero(new_size, new_size);
  r_new.topLeftCorner(size_, size_) = r_;
  r_new.block(0, size_, size_, p) = X.topRows(size_);
  r_new.block(size_, size_, p, p) = packed.topRows(p).triangularView<Eigen::Upper>();
  r_ = std::move(r_new);
  size_ = new_size;
}

DenseMatrix HouseholderQR::r() const { return r_; }

DenseMatrix HouseholderQR::reconstruct() const {
  DenseMatrix padded = DenseMatrix::Zero(ambient_dim(), size_);
  padded.topRows(size_) = r_;
  return apply_q(padded);
}

// ---------------------------------------------------------------------------
// Pseudoinverse application

namespace {

template <typename MatrixA>
DenseMatrix apply_pinv_right_impl(const MatrixA& A, const DenseMatrix& B) {
  const Index k = B.rows();
  const Index n = B.cols();
  if (A.cols() != n) throw Error(ErrorKind::DimensionMismatch, "apply_pinv_right: A and B column counts differ");
  if (k > n) throw Error(ErrorKind::DimensionMismatch, "apply_pinv_right: B must have at most as many rows as columns");
  if (k == 0) return DenseMatrix::Zero(A.rows(), 0);

  // B^T = Q R, so B^+ = Q R^{-T} and A B^+ = (A Q) R^{-T}.
  Eigen::HouseholderQR<DenseMatrix> qr(B.transpose());
  const auto R = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  const double tol = kRankTol * B.norm();
  for (Index i = 0; i < k; ++i) {
    if (!(std::abs(qr.matrixQR()(i, i)) >= tol)) {
      throw Error(ErrorKind::RankDeficient, "apply_pinv_right: B is numerically row-rank deficient");
    }
  }
  DenseMatrix AQ = A * thin_q(qr, k);
  R.transpose().template solveInPlace<Eigen::OnTheRight>(AQ);
  return AQ;
}

}  // namespace

DenseMatrix apply_pinv_right(const DenseMatrix& A, const DenseMatrix& B) { return apply_pinv_right_impl(A, B); }

DenseMatrix apply_pinv_right(const SparseMatrix& A, const DenseMatrix& B) { return apply_pinv_right_impl(A, B); }

DenseMatrix apply_pinv_right_svd(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.cols() != B.cols()) throw Error(ErrorKind::DimensionMismatch, "apply_pinv_right_svd: column counts differ");
  Eigen::BDCSVD<DenseMatrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? kRankTol * s(0) : 0.0;
  Vector inv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  }
  return (A * svd.matrixV()) * inv.asDiagonal() * svd.matrixU().transpose();
}

DenseMatrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix G(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) G(i, j) = normal(rng);
  }
  return G;
}

Vector squared_row_norms(const DenseMatrix& Q) { return Q.rowwise().squaredNorm(); }

double orthonormality_defect(const DenseMatrix& Q) {
  // Q^T Q is symmetric: form the lower triangle only and count off-diagonal
  // entries twice.
  const Index k = Q.cols();
  DenseMatrix G = DenseMatrix::Zero(k, k);
  G.selfadjointView<Eigen::Lower>().rankUpdate(Q.transpose());
  double sum_sq = 0.0;
  for (Index j = 0; j < k; ++j) {
    const double d = G(j, j) - 1.0;
    sum_sq += d * d + 2.0 * G.col(j).tail(k - j - 1).squaredNorm();
  }
  return std::sqrt(sum_sq);
}

}  // namespace arpid
