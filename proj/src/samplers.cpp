#include "arpid/samplers.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <Eigen/Householder>

namespace arpid {

PivotSet::PivotSet(std::vector<Index> indices, Index ambient) : indices_(std::move(indices)), ambient_(ambient) {
  std::vector<Index> check = sorted();
  if (std::adjacent_find(check.begin(), check.end()) != check.end()) {
    throw Error(ErrorKind::InvalidParam, "PivotSet: duplicate index");
  }
  if (!check.empty() && (check.front() < 0 || check.back() >= ambient_)) {
    throw Error(ErrorKind::InvalidParam, "PivotSet: index out of range");
  }
}

std::vector<Index> PivotSet::sorted() const {
  std::vector<Index> out = indices_;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Index> leverage_multinomial(const Vector& scores, Index count, Rng& rng) {
  std::vector<double> cumulative(static_cast<std::size_t>(scores.size()));
  double total = 0.0;
  Index last_positive = -1;
  for (Index j = 0; j < scores.size(); ++j) {
    if (scores(j) > 0.0) {
      total += scores(j);
      last_positive = j;
    }
    cumulative[static_cast<std::size_t>(j)] = total;
  }
  if (last_positive < 0) throw Error(ErrorKind::DegenerateDistribution, "leverage_multinomial: no positive score");

  std::vector<Index> draws(static_cast<std::size_t>(count));
  for (auto& draw : draws) {
    const double target = uniform01(rng) * total;
    // First bucket whose cumulative mass exceeds the target; empty buckets
    // never satisfy cumulative[j-1] <= target < cumulative[j].
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    draw = std::min<Index>(static_cast<Index>(it - cumulative.begin()), last_positive);
  }
  return draws;
}

std::vector<Index> rejection_sample_submatrix(ProposalBlock& block, Rng& rng, const RejectionOptions& opts) {
  DenseMatrix& H = block.gram;
  const Index b = H.rows();
  if (H.cols() != b || block.leverage.size() != b) {
    throw Error(ErrorKind::DimensionMismatch, "rejection_sample_submatrix: inconsistent block");
  }
  std::vector<Index> accepted;
  for (Index i = 0; i < b; ++i) {
    const double lev = block.leverage(i);
    double residual = H(i, i);
    if (residual > lev + 1e-12) {
      throw std::logic_error("rejection_sample_submatrix: residual norm exceeds leverage score");
    }
    const double u = uniform01(rng);
    if (residual <= opts.zero_residual_tol * lev) continue;
    residual += opts.acceptance_slack;
    // Ratios above one from roundoff simply mean certain acceptance.
    if (!(lev * u < residual)) continue;

    accepted.push_back(i);
    const Index rest = b - i - 1;
    if (rest > 0) {
      // Only the lower triangle is read, so only the lower triangle is updated.
      H.bottomRightCorner(rest, rest).selfadjointView<Eigen::Lower>().rankUpdate(H.col(i).tail(rest), -1.0 / H(i, i));
    }
  }
  return accepted;
}

RejectionResult rejection_rpqr(const DenseMatrix& Q, Rng& rng, const RejectionConfig& cfg) {
  const Index m = Q.rows();
  const Index k = Q.cols();
  if (k == 0) throw Error(ErrorKind::EmptyMatrix, "rejection_rpqr: Q has no columns");
  if (k > m) throw Error(ErrorKind::DimensionMismatch, "rejection_rpqr: Q is wider than tall");
  const double defect = orthonormality_defect(Q);
  if (!(defect <= 1e-8)) {
    throw Error(ErrorKind::NotOrthonormal, "rejection_rpqr: ||Q^T Q - I||_F = " + std::to_string(defect));
  }

  const Vector leverage = squared_row_norms(Q);
  const Index block_size = cfg.block_size > 0 ? cfg.block_size : k;

  RejectionResult result{PivotSet{}, qr_empty(k), 0};
  std::vector<Index> selected;
  selected.reserve(static_cast<std::size_t>(k));

  while (static_cast<Index>(selected.size()) < k) {
    if (result.rounds >= cfg.max_rounds) {
      throw Error(ErrorKind::MaxRoundsExceeded, "rejection_rpqr: " + std::to_string(selected.size()) + " of " +
                                                    std::to_string(k) + " pivots after " +
                                                    std::to_string(cfg.max_rounds) + " rounds");
    }
    ++result.rounds;

    ProposalBlock block;
    block.proposals = leverage_multinomial(leverage, block_size, rng);
    DenseMatrix columns(k, block_size);
    block.leverage.resize(block_size);
    for (Index i = 0; i < block_size; ++i) {
      const Index t = block.proposals[static_cast<std::size_t>(i)];
      columns.col(i) = Q.row(t).transpose();
      block.leverage(i) = leverage(t);
    }
    // With Q^*(:,T) = U_full [Y; Z] split after |S| rows, the projected block is
    // C = U_full [0; Z], so C^* C = Z^* Z and U never has to be applied back.
    const DenseMatrix transformed = result.qr.apply_qt(columns);
    const auto Z = transformed.bottomRows(k - static_cast<Index>(selected.size()));
    block.gram = DenseMatrix::Zero(block_size, block_size);
    block.gram.selfadjointView<Eigen::Lower>().rankUpdate(Z.transpose());

    std::vector<Index> accepted = rejection_sample_submatrix(block, rng, cfg.rejection);
    const auto room = static_cast<std::size_t>(k) - selected.size();
    if (accepted.size() > room) accepted.resize(room);
    if (accepted.empty()) continue;

    DenseMatrix fresh(k, static_cast<Index>(accepted.size()));
    for (std::size_t a = 0; a < accepted.size(); ++a) {
      fresh.col(static_cast<Index>(a)) = transformed.col(accepted[a]);
      selected.push_back(block.proposals[static_cast<std::size_t>(accepted[a])]);
    }
    result.qr.append_transformed(fresh);
  }
  result.pivots = PivotSet(std::move(selected), m);
  return result;
}

PivotSet rpqr_sequential(const DenseMatrix& M, Index k, Rng& rng) {
  const Index d = M.rows();
  const Index m = M.cols();
  if (k > std::min(d, m)) throw Error(ErrorKind::RankDeficient, "rpqr_sequential: k exceeds min(d, m)");

  DenseMatrix work = M;
  Vector norms = work.colwise().squaredNorm().transpose();
  Vector reference = norms;
  const double floor = kRankTol * norms.sum();
  std::vector<Index> selected;
  selected.reserve(static_cast<std::size_t>(k));
  Vector essential(d);
  Vector workspace(m);

  for (Index step = 0; step < k; ++step) {
    const double total = norms.sum();
    if (!(total >= floor) || total <= 0.0) {
      throw Error(ErrorKind::RankDeficient,
                  "rpqr_sequential: residual exhausted after " + std::to_string(step) + " pivots");
    }
    const Index pick = leverage_multinomial(norms, 1, rng).front();
    selected.push_back(pick);

    // Reflect rows step..d-1 so the picked column becomes a multiple of e_step;
    // the residual of every column is then its part below row `step`.
    const Index tail = d - step;
    auto active = work.bottomRows(tail);
    double tau = 0.0;
    double beta = 0.0;
    auto ess = essential.head(tail - 1);
    active.col(pick).makeHouseholder(ess, tau, beta);
    active.applyHouseholderOnTheLeft(ess, tau, workspace.data());

    for (Index j = 0; j < m; ++j) {
      if (norms(j) == 0.0) continue;
      const double lead = work(step, j);
      double updated = norms(j) - lead * lead;
      if (updated < 1e-8 * reference(j)) {
        updated = work.col(j).tail(tail - 1).squaredNorm();
        reference(j) = updated;
      }
      norms(j) = std::max(updated, 0.0);
    }
    norms(pick) = 0.0;
  }
  return PivotSet(std::move(selected), m);
}

}  // namespace arpid
