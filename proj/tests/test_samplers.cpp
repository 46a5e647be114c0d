#include <gtest/gtest.h>

#include <set>

#include "arpid/oracle.hpp"
#include "arpid/samplers.hpp"
#include "test_util.hpp"

using namespace arpid;

namespace {

ProposalBlock make_block(const DenseMatrix& gram, const Vector& lev) {
  ProposalBlock block;
  block.proposals.resize(static_cast<std::size_t>(gram.rows()));
  block.gram = gram;
  block.leverage = lev;
  return block;
}

}  // namespace

TEST(PivotSetTest, RejectsDuplicatesAndOutOfRange) {
  EXPECT_THROW(PivotSet({1, 1}, 3), Error);
  EXPECT_THROW(PivotSet({3}, 3), Error);
  const PivotSet s({2, 0}, 3);
  EXPECT_EQ(s.sorted(), (std::vector<Index>{0, 2}));
  EXPECT_EQ(s[0], 2);
}

TEST(LeverageMultinomial, PointMass) {
  Rng rng(1);
  Vector l(3);
  l << 1, 0, 0;
  for (Index d : leverage_multinomial(l, 5, rng)) EXPECT_EQ(d, 0);
}

TEST(LeverageMultinomial, FairCoin) {
  Rng rng(2);
  Vector l(2);
  l << 1, 1;
  const auto draws = leverage_multinomial(l, 100000, rng);
  const double f = static_cast<double>(std::count(draws.begin(), draws.end(), 0)) / 1e5;
  EXPECT_GE(f, 0.49);
  EXPECT_LE(f, 0.51);
}

TEST(LeverageMultinomial, WeightedFrequencies) {
  Rng rng(3);
  Vector l(3);
  l << 2, 1, 1;
  const auto draws = leverage_multinomial(l, 100000, rng);
  const double expected[] = {0.5, 0.25, 0.25};
  for (Index j = 0; j < 3; ++j) {
    const double f = static_cast<double>(std::count(draws.begin(), draws.end(), j)) / 1e5;
    EXPECT_NEAR(f, expected[j], 0.01);
  }
}

TEST(LeverageMultinomial, ZeroRowsNeverDrawn) {
  Rng rng(4);
  Vector l(5);
  l << 0, 0.3, 0, 0.7, 0;
  for (Index d : leverage_multinomial(l, 20000, rng)) EXPECT_TRUE(d == 1 || d == 3);
}

TEST(LeverageMultinomial, Degenerate) {
  Rng rng(5);
  try {
    leverage_multinomial(Vector::Zero(4), 3, rng);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateDistribution);
  }
}

TEST(RejectionSampleSubmatrix, IdentityAcceptsEverything) {
  Rng rng(6);
  auto block = make_block(DenseMatrix::Identity(4, 4), Vector::Ones(4));
  EXPECT_EQ(rejection_sample_submatrix(block, rng), (std::vector<Index>{0, 1, 2, 3}));
}

TEST(RejectionSampleSubmatrix, ZeroAcceptsNothing) {
  Rng rng(7);
  auto block = make_block(DenseMatrix::Zero(4, 4), Vector::Ones(4));
  EXPECT_TRUE(rejection_sample_submatrix(block, rng).empty());
}

TEST(RejectionSampleSubmatrix, DuplicateNeverFollowsItsTwin) {
  // Proposals t1 = t2 with leverage 0.5 each; t3 a different row.
  DenseMatrix Qt(2, 3);
  Qt << 0.5, 0.5, 0.6, 0.5, 0.5, -0.1;
  const DenseMatrix gram = Qt.transpose() * Qt;
  const Vector lev = Qt.colwise().squaredNorm().transpose();
  Rng rng(8);
  int first_accepted = 0;
  for (int t = 0; t < 100000; ++t) {
    auto block = make_block(gram, lev);
    const auto acc = rejection_sample_submatrix(block, rng);
    if (!acc.empty() && acc[0] == 0) {
      ++first_accepted;
      EXPECT_TRUE(acc.size() < 2 || acc[1] != 1);
    }
  }
  EXPECT_GT(first_accepted, 0);
}

TEST(RejectionSampleSubmatrix, RatioAboveOneIsAnInvariantViolation) {
  Rng rng(9);
  auto block = make_block(DenseMatrix::Identity(2, 2) * 2.0, Vector::Ones(2));
  EXPECT_THROW(rejection_sample_submatrix(block, rng), std::logic_error);
}

TEST(RejectionRpqr, CoordinateBasisPicksItsRows) {
  Rng rng(10);
  const auto res = rejection_rpqr(DenseMatrix::Identity(6, 3), rng);
  EXPECT_EQ(res.pivots.sorted(), (std::vector<Index>{0, 1, 2}));
}

TEST(RejectionRpqr, SquareOrthogonalTakesEverything) {
  Rng rng(11);
  const DenseMatrix Q = oracles::random_orthogonal(5, rng);
  const auto res = rejection_rpqr(Q, rng);
  EXPECT_EQ(res.pivots.sorted(), (std::vector<Index>{0, 1, 2, 3, 4}));
}

TEST(RejectionRpqr, QrReconstructsSelectedColumns) {
  Rng rng(12);
  for (int t = 0; t < 10; ++t) {
    const DenseMatrix Q = orth(gaussian_matrix(40, 6, rng));
    const auto res = rejection_rpqr(Q, rng);
    DenseMatrix cols(6, 6);
    for (Index j = 0; j < 6; ++j) cols.col(j) = Q.row(res.pivots[j]).transpose();
    EXPECT_LE((res.qr.reconstruct() - cols).norm(), 1e-12 * cols.norm());
  }
}

TEST(RejectionRpqr, ZeroRowsNeverSelected) {
  Rng rng(13);
  DenseMatrix Q = DenseMatrix::Zero(12, 3);
  Q.topRows(6) = orth(gaussian_matrix(6, 3, rng));
  for (int t = 0; t < 200; ++t) {
    const auto res = rejection_rpqr(Q, rng);
    for (Index p : res.pivots.indices()) EXPECT_LT(p, 6);
  }
}

TEST(RejectionRpqr, Deterministic) {
  Rng g(14);
  const DenseMatrix Q = orth(gaussian_matrix(30, 5, g));
  Rng a(77), b(77);
  EXPECT_EQ(rejection_rpqr(Q, a).pivots, rejection_rpqr(Q, b).pivots);
}

TEST(RejectionRpqr, Errors) {
  Rng rng(15);
  try {
    rejection_rpqr(DenseMatrix::Ones(5, 2), rng);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotOrthonormal);
  }
  RejectionConfig cfg;
  cfg.max_rounds = 0;
  try {
    rejection_rpqr(DenseMatrix::Identity(5, 2), rng, cfg);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MaxRoundsExceeded);
  }
}

TEST(RejectionRpqr, MatchesVolumeSampling) {
  Rng rng(16);
  const DenseMatrix Q = orth(gaussian_matrix(5, 2, rng));
  const auto truth = oracle::enumerate_volume_probs(Q, 2);
  std::vector<oracle::Subset> samples;
  for (int t = 0; t < 50000; ++t) samples.push_back(rejection_rpqr(Q, rng).pivots.sorted());
  EXPECT_LT(oracle::total_variation(truth, oracle::empirical(samples)), 0.015);
}

TEST(RpqrSequential, RankOneColumn) {
  Rng rng(17);
  DenseMatrix M = DenseMatrix::Zero(4, 4);
  M(0, 0) = 1.0;
  for (int t = 0; t < 50; ++t) EXPECT_EQ(rpqr_sequential(M, 1, rng).indices(), std::vector<Index>{0});
}

TEST(RpqrSequential, IdentityGivesUniformFirstPivot) {
  Rng rng(18);
  const Index m = 5;
  std::vector<int> counts(m, 0);
  for (int t = 0; t < 50000; ++t) {
    const auto s = rpqr_sequential(DenseMatrix::Identity(m, m), m, rng);
    EXPECT_EQ(s.sorted().size(), static_cast<std::size_t>(m));
    ++counts[static_cast<std::size_t>(s[0])];
  }
  for (int c : counts) EXPECT_NEAR(c / 50000.0, 0.2, 0.01);
}

TEST(RpqrSequential, MatchesVolumeSampling) {
  Rng rng(19);
  const DenseMatrix Q = orth(gaussian_matrix(5, 2, rng));
  const auto truth = oracle::enumerate_volume_probs(Q, 2);
  std::vector<oracle::Subset> samples;
  const DenseMatrix Qt = Q.transpose();
  for (int t = 0; t < 100000; ++t) samples.push_back(rpqr_sequential(Qt, 2, rng).sorted());
  EXPECT_LT(oracle::total_variation(truth, oracle::empirical(samples)), 0.01);
}

TEST(RpqrSequential, LeavesInputUntouchedAndReportsRankDeficiency) {
  Rng rng(20);
  const DenseMatrix M = gaussian_matrix(3, 2, rng) * gaussian_matrix(2, 6, rng);
  const DenseMatrix copy = M;
  EXPECT_EQ(rpqr_sequential(M, 2, rng).size(), 2);
  EXPECT_EQ(M, copy);
  try {
    rpqr_sequential(M, 3, rng);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RankDeficient);
  }
}
