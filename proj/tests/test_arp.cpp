#include <gtest/gtest.h>

#include "arpid/arp.hpp"
#include "arpid/bench.hpp"
#include "arpid/oracle.hpp"
#include "test_util.hpp"

using namespace arpid;

namespace {

constexpr Variant kVariants[] = {Variant::Type1, Variant::Type2, Variant::OSID};

double interpolation_defect(const InterpolativeDecomposition& id) {
  const DenseMatrix WS = id.W(id.pivots.indices(), Eigen::all);
  return (WS - DenseMatrix::Identity(WS.rows(), WS.cols())).norm();
}

}  // namespace

TEST(Rangefinder, IdentityIsFullySpanned) {
  // With zeta = 1 the sketch of I is a CountSketch whose columns can collide,
  // so the width may drop; whatever Q spans, it spans exactly.
  const DenseMatrix A = DenseMatrix::Identity(6, 6);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const DenseMatrix Q = rangefinder(A, 6, 1, rng);
    EXPECT_LE(orthonormality_defect(Q), 1e-14);
    const double residual = (A - Q * (Q.transpose() * A)).norm();
    EXPECT_NEAR(residual * residual, static_cast<double>(6 - Q.cols()), 1e-12);
  }
  Rng rng(1);
  const DenseMatrix Q = rangefinder(A, 6, 6, rng);
  EXPECT_EQ(Q.cols(), 6);
  EXPECT_LE((A - Q * (Q.transpose() * A)).norm(), 1e-12);
}

TEST(Rangefinder, ExactRankReproduced) {
  Rng rng(2);
  int full_width = 0;
  for (int t = 0; t < 20; ++t) {
    DenseMatrix D = DenseMatrix::Zero(12, 12);
    D.diagonal().head(3).setOnes();
    const DenseMatrix A = D * oracles::random_orthogonal(12, rng);
    const DenseMatrix Q = rangefinder(A, 3, 1, rng);
    // A degenerate sketch (colliding columns) shows up as a narrower basis.
    if (Q.cols() < 3) continue;
    ++full_width;
    EXPECT_LE((A - Q * (Q.transpose() * A)).norm(), 1e-10 * A.norm());
  }
  EXPECT_GE(full_width, 15);
}

TEST(Rangefinder, RankDeficientSketchIsNarrower) {
  Rng rng(3);
  const DenseMatrix A = gaussian_matrix(20, 2, rng) * gaussian_matrix(2, 15, rng);
  const DenseMatrix Q = rangefinder(A, 8, 4, rng);
  EXPECT_EQ(Q.cols(), 2);
  EXPECT_LE(orthonormality_defect(Q), 1e-12);
}

TEST(Rangefinder, RoundsWidthAndTruncates) {
  Rng rng(4);
  const DenseMatrix A = gaussian_matrix(30, 25, rng);
  EXPECT_EQ(rangefinder(A, 5, 4, rng).cols(), 5);
}

TEST(Rangefinder, DecaySpectrumNearOptimal) {
  Rng rng(5);
  int good = 0;
  for (int t = 0; t < 10; ++t) {
    const DenseMatrix A = bench::gen_decay_dense(300, 300, rng);
    const DenseMatrix Q = rangefinder(A, 50, 4, rng);
    if ((A - Q * (Q.transpose() * A)).norm() <= 10.0 * oracles::optimal_error(A, 25)) ++good;
  }
  EXPECT_GE(good, 9);
}

TEST(ArpDecompose, CanonicalRowsExact) {
  DenseMatrix A = DenseMatrix::Zero(8, 6);
  A.topLeftCorner(3, 3).setIdentity();
  for (Variant v : kVariants) {
    ArpConfig cfg;
    cfg.k = 3;
    cfg.zeta = 1;
    cfg.variant = v;
    cfg.seed = 7;
    const auto id = arp_decompose(A, cfg);
    EXPECT_EQ(id.pivots.sorted(), (std::vector<Index>{0, 1, 2})) << to_string(v);
    EXPECT_LE(interpolation_defect(id), 1e-10);
    EXPECT_LE(residual_fro(A, id), 1e-12);
  }
}

TEST(ArpDecompose, InterpolationProperty) {
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    const DenseMatrix A = bench::gen_decay_dense(60, 40, rng);
    for (Variant v : kVariants) {
      ArpConfig cfg;
      cfg.k = 8;
      cfg.variant = v;
      const auto id = arp_decompose(A, cfg, rng);
      EXPECT_EQ(id.W.rows(), 60);
      EXPECT_EQ(id.W.cols(), 8);
      EXPECT_LE(interpolation_defect(id), 1e-10) << to_string(v);
    }
  }
}

TEST(ArpDecompose, SequentialSamplerAlsoInterpolates) {
  Rng rng(7);
  const DenseMatrix A = gaussian_matrix(30, 20, rng);
  for (Variant v : kVariants) {
    ArpConfig cfg;
    cfg.k = 4;
    cfg.variant = v;
    cfg.sampler = PivotSampler::Sequential;
    EXPECT_LE(interpolation_defect(arp_decompose(A, cfg, rng)), 1e-10);
  }
}

TEST(ArpDecompose, SparseInputMatchesDense) {
  Rng rng(8);
  const SparseMatrix As = bench::gen_decay_sparse(80, 50, 5, rng);
  const DenseMatrix Ad(As);
  for (Variant v : kVariants) {
    ArpConfig cfg;
    cfg.k = 6;
    cfg.variant = v;
    cfg.seed = 99;
    const auto s = arp_decompose(As, cfg);
    const auto d = arp_decompose(Ad, cfg);
    EXPECT_EQ(s.pivots, d.pivots);
    EXPECT_LE((s.W - d.W).norm(), 1e-10 * (1.0 + d.W.norm()));
    EXPECT_NEAR(residual_fro(As, s), residual_fro(Ad, d), 1e-10 * Ad.norm());
  }
}

TEST(ArpDecompose, SeededRunsAreBitIdentical) {
  Rng rng(9);
  const DenseMatrix A = gaussian_matrix(40, 30, rng);
  for (Variant v : kVariants) {
    ArpConfig cfg;
    cfg.k = 5;
    cfg.variant = v;
    cfg.seed = 1234;
    const auto a = arp_decompose(A, cfg);
    const auto b = arp_decompose(A, cfg);
    EXPECT_EQ(a.pivots, b.pivots);
    EXPECT_TRUE(a.W == b.W);
  }
}

TEST(ArpDecompose, SharedSeedSharesPivotsAcrossVariants) {
  Rng rng(10);
  const DenseMatrix A = gaussian_matrix(40, 30, rng);
  ArpConfig cfg;
  cfg.k = 5;
  cfg.seed = 4;
  cfg.variant = Variant::Type1;
  const auto t1 = arp_decompose(A, cfg);
  cfg.variant = Variant::Type2;
  const auto t2 = arp_decompose(A, cfg);
  EXPECT_EQ(t1.pivots, t2.pivots);
  EXPECT_LE(residual_fro(A, t2), residual_fro(A, t1) + 1e-12 * A.norm());
}

TEST(ArpDecompose, RankDeficientInputRunsAtReducedRank) {
  Rng rng(11);
  const DenseMatrix A = gaussian_matrix(25, 2, rng) * gaussian_matrix(2, 20, rng);
  ArpConfig cfg;
  cfg.k = 4;
  cfg.variant = Variant::Type2;
  const auto id = arp_decompose(A, cfg, rng);
  EXPECT_EQ(id.effective_rank, 2);
  EXPECT_EQ(id.pivots.size(), 2);
  EXPECT_LE(residual_fro(A, id), 1e-10 * A.norm());
}

TEST(ArpDecompose, InvalidConfig) {
  const DenseMatrix A = DenseMatrix::Identity(4, 4);
  ArpConfig cfg;
  cfg.k = 5;
  EXPECT_THROW(arp_decompose(A, cfg), Error);
  cfg.k = 2;
  cfg.oversample = 0.5;
  EXPECT_THROW(arp_decompose(A, cfg), Error);
}

TEST(ProjectionInterpolation, FallbackFlagOnDuplicateRows) {
  DenseMatrix A(3, 3);
  A << 1, 2, 3, 1, 2, 3, 0, 1, 0;
  bool fallback = false;
  const DenseMatrix W = projection_interpolation(A, {0, 1}, &fallback);
  EXPECT_TRUE(fallback);
  EXPECT_LE((W * A.topRows(2) - A).row(0).norm(), 1e-12);
}

TEST(ResidualFro, ZeroInterpolationGivesNorm) {
  Rng rng(12);
  const DenseMatrix A = gaussian_matrix(7, 300, rng);
  EXPECT_NEAR(residual_fro(A, DenseMatrix::Zero(7, 2), {0, 3}), A.norm(), 1e-12 * A.norm());
  const SparseMatrix As = A.sparseView();
  EXPECT_NEAR(residual_fro(As, DenseMatrix::Zero(7, 2), {0, 3}), A.norm(), 1e-12 * A.norm());
}

TEST(ResidualFro, ExactRankIsZero) {
  Rng rng(13);
  const DenseMatrix A = gaussian_matrix(10, 3, rng) * gaussian_matrix(3, 12, rng);
  const std::vector<Index> S = {1, 4, 7};
  const DenseMatrix W = projection_interpolation(A, S);
  EXPECT_LE(residual_fro(A, W, S), 1e-10 * A.norm());
}

TEST(ResidualFro, ShapeMismatch) {
  EXPECT_THROW(residual_fro(DenseMatrix::Ones(4, 4), DenseMatrix::Ones(3, 2), {0, 1}), Error);
}

TEST(ResidualFro, TypeTwoNeverWorseThanTypeOne) {
  Rng rng(14);
  for (int t = 0; t < 20; ++t) {
    const DenseMatrix A = bench::gen_decay_dense(40, 30, rng);
    const DenseMatrix Q = rangefinder(A, 6, 2, rng);
    const auto sample = rejection_rpqr(Q, rng);
    const DenseMatrix W1 = type1_interpolation(Q, sample.qr);
    const DenseMatrix W2 = projection_interpolation(A, sample.pivots.indices());
    EXPECT_LE(residual_fro(A, W2, sample.pivots.indices()),
              residual_fro(A, W1, sample.pivots.indices()) + 1e-12 * A.norm());
  }
}

TEST(Type1Identity, EnumeratedExpectationSmallCase) {
  Rng rng(15);
  const DenseMatrix A = gaussian_matrix(8, 6, rng);
  const DenseMatrix Q = orth(gaussian_matrix(8, 2, rng));
  const auto pair = oracle::expected_type1_error(A, Q);
  EXPECT_NEAR(pair.lhs, pair.rhs, 1e-10 * pair.rhs);
}
