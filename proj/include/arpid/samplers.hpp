#pragma once

#include <vector>

#include "arpid/common.hpp"
#include "arpid/linalg.hpp"

namespace arpid {

/// Distinct row indices (0-based) in the order they were selected.
class PivotSet {
 public:
  PivotSet() = default;
  PivotSet(std::vector<Index> indices, Index ambient);

  const std::vector<Index>& indices() const { return indices_; }
  Index ambient() const { return ambient_; }
  Index size() const { return static_cast<Index>(indices_.size()); }
  Index operator[](Index i) const { return indices_[static_cast<std::size_t>(i)]; }

  /// Indices sorted ascending, the canonical key of the selected subset.
  std::vector<Index> sorted() const;

  friend bool operator==(const PivotSet&, const PivotSet&) = default;

 private:
  std::vector<Index> indices_;
  Index ambient_ = 0;
};

/// `count` iid draws with P{j} = scores(j) / sum(scores). Rows with zero score
/// are never drawn. Throws DegenerateDistribution if no score is positive.
std::vector<Index> leverage_multinomial(const Vector& scores, Index count, Rng& rng);

/// One block of rejection-sampling proposals. `gram` is C^T C for the projected
/// proposal columns C (only its lower triangle is read) and `leverage` holds the
/// leverage score of each proposal.
struct ProposalBlock {
  std::vector<Index> proposals;
  DenseMatrix gram;
  Vector leverage;
};

struct RejectionOptions {
  // Residual diagonals at or below this fraction of the leverage score are
  // treated as exact zeros, so duplicate proposals are never accepted.
  double zero_residual_tol = 1e-12;
  // Added to the acceptance threshold. Nonzero values break exactness and
  // exist only so the verification suite can confirm it detects a broken rule.
  double acceptance_slack = 0.0;
};

/// Walks the block once; proposal i is accepted when leverage(i) * u < H(i,i),
/// after which its Schur complement is eliminated from the trailing block.
/// Returns accepted positions within the block, in order. `gram` is consumed.
std::vector<Index> rejection_sample_submatrix(ProposalBlock& block, Rng& rng, const RejectionOptions& opts = {});

struct RejectionConfig {
  Index block_size = 0;  // 0 means k, the width of Q
  int max_rounds = 64;
  RejectionOptions rejection;
};

struct RejectionResult {
  PivotSet pivots;
  HouseholderQR qr;  // factorization of Q^T(:, pivots) in pivot order
  int rounds = 0;
};

/// Volume-sampled row subset of an orthonormal m x k matrix Q by block
/// rejection sampling from the leverage-score distribution. Throws
/// NotOrthonormal when ||Q^T Q - I||_F > 1e-8 and MaxRoundsExceeded when the
/// round cap is reached before k pivots are accepted.
RejectionResult rejection_rpqr(const DenseMatrix& Q, Rng& rng, const RejectionConfig& cfg = {});

/// Sequential randomly pivoted QR on the columns of M (d x m): sample a column
/// with probability proportional to its residual squared norm, reflect it out of
/// the working copy, repeat k times.
PivotSet rpqr_sequential(const DenseMatrix& M, Index k, Rng& rng);

}  // namespace arpid
