#include "arpid/arp.hpp"

#include <cmath>

#include "arpid/linalg.hpp"
#include "arpid/sketch.hpp"

namespace arpid {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Type1: return "Type1";
    case Variant::Type2: return "Type2";
    case Variant::OSID: return "OSID";
  }
  return "Unknown";
}

namespace {

template <typename MatrixA>
DenseMatrix rangefinder_impl(const MatrixA& A, Index k, Index zeta, Rng& rng) {
  if (k < 1) throw Error(ErrorKind::InvalidParam, "rangefinder: k must be positive");
  if (k > std::min(A.rows(), A.cols())) throw Error(ErrorKind::InvalidParam, "rangefinder: k exceeds min(m, n)");
  const Index width = round_up_to_multiple(k, zeta);
  const auto omega = sparsestack_new(A.cols(), width, zeta, rng);
  DenseMatrix Q = orth(apply_right(A, omega));
  if (Q.cols() > k) Q.conservativeResize(Eigen::NoChange, k);
  return Q;
}

template <typename MatrixA>
DenseMatrix pinv_with_fallback(const MatrixA& lhs, const DenseMatrix& rhs, bool* fallback) {
  try {
    return apply_pinv_right(lhs, rhs);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::RankDeficient) throw;
    if (fallback) *fallback = true;
    return apply_pinv_right_svd(DenseMatrix(lhs), rhs);
  }
}

template <typename MatrixA>
DenseMatrix osid_impl(const MatrixA& A, const std::vector<Index>& pivots, Index width, Index zeta, Rng& rng,
                      bool* fallback) {
  const auto phi = sparsestack_new(A.cols(), round_up_to_multiple(width, zeta), zeta, rng);
  const DenseMatrix sketch = apply_right(A, phi);
  return pinv_with_fallback(sketch, select_rows(sketch, pivots), fallback);
}

template <typename MatrixA>
InterpolativeDecomposition decompose_impl(const MatrixA& A, const ArpConfig& cfg, Rng& rng) {
  if (cfg.oversample < 1.0) throw Error(ErrorKind::InvalidParam, "arp_decompose: oversampling factor must be >= 1");
  InterpolativeDecomposition id;
  id.variant = cfg.variant;
  id.config = cfg;

  const DenseMatrix Q = rangefinder_impl(A, cfg.k, cfg.zeta, rng);
  const Index rank = Q.cols();
  if (rank == 0) throw Error(ErrorKind::RankDeficient, "arp_decompose: sketch of A is numerically zero");
  id.effective_rank = rank;

  HouseholderQR qr = qr_empty(rank);
  if (cfg.sampler == PivotSampler::Rejection) {
    RejectionConfig rcfg;
    rcfg.max_rounds = cfg.max_rounds;
    auto sampled = rejection_rpqr(Q, rng, rcfg);
    id.pivots = std::move(sampled.pivots);
    qr = std::move(sampled.qr);
  } else {
    const DenseMatrix Qt = Q.transpose();
    id.pivots = rpqr_sequential(Qt, rank, rng);
    if (cfg.variant == Variant::Type1) qr.append(Qt(Eigen::all, id.pivots.indices()));
  }

  switch (cfg.variant) {
    case Variant::Type1:
      id.W = type1_interpolation(Q, qr);
      break;
    case Variant::Type2:
      id.W = pinv_with_fallback(A, select_rows(A, id.pivots.indices()), &id.pinv_fallback);
      break;
    case Variant::OSID: {
      const auto width = static_cast<Index>(std::llround(cfg.oversample * static_cast<double>(rank)));
      id.W = osid_impl(A, id.pivots.indices(), width, cfg.zeta, rng, &id.pinv_fallback);
      break;
    }
  }
  return id;
}

template <typename MatrixA>
double residual_impl(const MatrixA& A, const DenseMatrix& W, const std::vector<Index>& pivots) {
  if (W.rows() != A.rows() || W.cols() != static_cast<Index>(pivots.size())) {
    throw Error(ErrorKind::DimensionMismatch, "residual_fro: W does not match A and the pivot count");
  }
  const DenseMatrix selected = select_rows(A, pivots);
  constexpr Index kBlock = 256;
  double sum_sq = 0.0;
  for (Index c = 0; c < A.cols(); c += kBlock) {
    const Index w = std::min(kBlock, A.cols() - c);
    DenseMatrix block = A.middleCols(c, w);
    block.noalias() -= W * selected.middleCols(c, w);
    sum_sq += block.squaredNorm();
  }
  return std::sqrt(sum_sq);
}

}  // namespace

DenseMatrix rangefinder(const DenseMatrix& A, Index k, Index zeta, Rng& rng) {
  return rangefinder_impl(A, k, zeta, rng);
}

DenseMatrix rangefinder(const SparseMatrix& A, Index k, Index zeta, Rng& rng) {
  return rangefinder_impl(A, k, zeta, rng);
}

DenseMatrix select_rows(const DenseMatrix& A, const std::vector<Index>& rows) { return A(rows, Eigen::all); }

DenseMatrix select_rows(const SparseMatrix& A, const std::vector<Index>& rows) {
  std::vector<Index> position(static_cast<std::size_t>(A.rows()), -1);
  for (std::size_t p = 0; p < rows.size(); ++p) position[static_cast<std::size_t>(rows[p])] = static_cast<Index>(p);
  DenseMatrix out = DenseMatrix::Zero(static_cast<Index>(rows.size()), A.cols());
  for (Index j = 0; j < A.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
      const Index p = position[static_cast<std::size_t>(it.row())];
      if (p >= 0) out(p, j) = it.value();
    }
  }
  return out;
}

DenseMatrix type1_interpolation(const DenseMatrix& Q, const HouseholderQR& qr_of_selected) {
  if (qr_of_selected.ambient_dim() != Q.cols() || qr_of_selected.size() != Q.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "type1_interpolation: factorization does not cover Q(S,:)");
  }
  // Q(S,:) = R^T U^T, so Q Q(S,:)^{-1} = (R^{-1} U^T Q^T)^T.
  DenseMatrix Wt = qr_of_selected.apply_qt(Q.transpose());
  const DenseMatrix R = qr_of_selected.r();
  const double tol = kRankTol * R.norm();
  for (Index i = 0; i < R.rows(); ++i) {
    if (!(std::abs(R(i, i)) >= tol)) throw Error(ErrorKind::RankDeficient, "type1_interpolation: Q(S,:) is singular");
  }
  R.triangularView<Eigen::Upper>().solveInPlace(Wt);
  return Wt.transpose();
}

InterpolativeDecomposition arp_decompose(const DenseMatrix& A, const ArpConfig& cfg, Rng& rng) {
  return decompose_impl(A, cfg, rng);
}

InterpolativeDecomposition arp_decompose(const SparseMatrix& A, const ArpConfig& cfg, Rng& rng) {
  return decompose_impl(A, cfg, rng);
}

InterpolativeDecomposition arp_decompose(const DenseMatrix& A, const ArpConfig& cfg) {
  Rng rng(cfg.seed);
  return decompose_impl(A, cfg, rng);
}

InterpolativeDecomposition arp_decompose(const SparseMatrix& A, const ArpConfig& cfg) {
  Rng rng(cfg.seed);
  return decompose_impl(A, cfg, rng);
}

DenseMatrix projection_interpolation(const DenseMatrix& A, const std::vector<Index>& pivots, bool* fallback) {
  return pinv_with_fallback(A, select_rows(A, pivots), fallback);
}

DenseMatrix projection_interpolation(const SparseMatrix& A, const std::vector<Index>& pivots, bool* fallback) {
  return pinv_with_fallback(A, select_rows(A, pivots), fallback);
}

DenseMatrix osid_interpolation(const DenseMatrix& A, const std::vector<Index>& pivots, Index width, Index zeta,
                               Rng& rng, bool* fallback) {
  return osid_impl(A, pivots, width, zeta, rng, fallback);
}

DenseMatrix osid_interpolation(const SparseMatrix& A, const std::vector<Index>& pivots, Index width, Index zeta,
                               Rng& rng, bool* fallback) {
  return osid_impl(A, pivots, width, zeta, rng, fallback);
}

double residual_fro(const DenseMatrix& A, const InterpolativeDecomposition& id) {
  return residual_impl(A, id.W, id.pivots.indices());
}

double residual_fro(const SparseMatrix& A, const InterpolativeDecomposition& id) {
  return residual_impl(A, id.W, id.pivots.indices());
}

double residual_fro(const DenseMatrix& A, const DenseMatrix& W, const std::vector<Index>& pivots) {
  return residual_impl(A, W, pivots);
}

double residual_fro(const SparseMatrix& A, const DenseMatrix& W, const std::vector<Index>& pivots) {
  return residual_impl(A, W, pivots);
}

}  // namespace arpid
