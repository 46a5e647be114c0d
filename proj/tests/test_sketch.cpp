#include <gtest/gtest.h>

#include <cmath>

#include "arpid/sketch.hpp"
#include "test_util.hpp"

using namespace arpid;

namespace {

void expect_structure(const SparseStackEmbedding& emb) {
  const DenseMatrix Om = DenseMatrix(materialize(emb));
  const double v = 1.0 / std::sqrt(static_cast<double>(emb.zeta()));
  const Index b = emb.block_width();
  for (Index i = 0; i < emb.n(); ++i) {
    for (Index j = 0; j < emb.zeta(); ++j) {
      Index count = 0;
      for (Index c = j * b; c < (j + 1) * b; ++c) {
        if (Om(i, c) != 0.0) {
          ++count;
          EXPECT_EQ(std::abs(Om(i, c)), v);
        }
      }
      EXPECT_EQ(count, 1) << "row " << i << " block " << j;
    }
    EXPECT_NEAR(Om.row(i).squaredNorm(), 1.0, 1e-15);
  }
}

}  // namespace

TEST(SparseStack, CountSketchRows) {
  const auto emb = sparsestack_new(4, 4, 1, std::uint64_t{1});
  EXPECT_EQ(emb.block_width(), 4);
  const DenseMatrix Om = DenseMatrix(materialize(emb));
  for (Index i = 0; i < 4; ++i) {
    EXPECT_EQ((Om.row(i).array() != 0.0).count(), 1);
    EXPECT_EQ(Om.row(i).cwiseAbs().sum(), 1.0);
  }
}

TEST(SparseStack, FullSparsityGivesDenseHalfRows) {
  const auto emb = sparsestack_new(3, 4, 4, std::uint64_t{2});
  EXPECT_EQ(emb.block_width(), 1);
  const DenseMatrix Om = DenseMatrix(materialize(emb));
  EXPECT_TRUE((Om.array().abs() == 0.5).all());
}

TEST(SparseStack, StructureScan) {
  const auto emb = sparsestack_new(100, 20, 4, std::uint64_t{3});
  EXPECT_EQ(materialize(emb).nonZeros(), 400);
  expect_structure(emb);
}

TEST(SparseStack, StructureAcrossSeedsAndShapes) {
  const Index shapes[][3] = {{1, 1, 1}, {7, 6, 2}, {50, 12, 4}, {33, 16, 8}, {10, 9, 3}};
  for (const auto& s : shapes) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto emb = sparsestack_new(s[0], s[1], s[2], seed);
      EXPECT_EQ(materialize(emb).nonZeros(), s[0] * s[2]);
      expect_structure(emb);
    }
  }
}

TEST(SparseStack, InvalidSparsity) {
  EXPECT_THROW(sparsestack_new(5, 6, 4, std::uint64_t{0}), Error);
  EXPECT_THROW(sparsestack_new(5, 2, 4, std::uint64_t{0}), Error);
  try {
    sparsestack_new(5, 6, 4, std::uint64_t{0});
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidSparsity);
  }
}

TEST(SparseStack, Deterministic) {
  const auto a = sparsestack_new(40, 12, 4, std::uint64_t{99});
  const auto b = sparsestack_new(40, 12, 4, std::uint64_t{99});
  EXPECT_TRUE(DenseMatrix(materialize(a)) == DenseMatrix(materialize(b)));
  const auto c = sparsestack_new(40, 12, 4, std::uint64_t{100});
  EXPECT_FALSE(DenseMatrix(materialize(a)) == DenseMatrix(materialize(c)));
}

TEST(SparseStack, DrawOrderIsRowMajorSignThenBlock) {
  const std::uint64_t seed = 5;
  const auto emb = sparsestack_new(3, 6, 2, seed);
  Rng rng(seed);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 2; ++j) {
      const int sign = (rng() >> 63) ? 1 : -1;
      const Index block = uniform_index(rng, 3);
      EXPECT_EQ(emb.sign(i, j), sign);
      EXPECT_EQ(emb.block_index(i, j), block);
    }
  }
}

TEST(SparseStack, Isotropy) {
  const Index n = 10;
  DenseMatrix mean = DenseMatrix::Zero(n, n);
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const DenseMatrix Om = DenseMatrix(materialize(sparsestack_new(n, 8, 4, seed)));
    mean += Om * Om.transpose();
  }
  mean /= 2000.0;
  EXPECT_LE((mean - DenseMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 0.1);
}

TEST(RoundUp, Multiples) {
  EXPECT_EQ(round_up_to_multiple(1, 4), 4);
  EXPECT_EQ(round_up_to_multiple(8, 4), 8);
  EXPECT_EQ(round_up_to_multiple(9, 4), 12);
  EXPECT_EQ(round_up_to_multiple(7, 1), 7);
}

TEST(ApplyRight, ZeroAndIdentity) {
  const auto emb = sparsestack_new(6, 4, 2, std::uint64_t{7});
  EXPECT_TRUE(apply_right(DenseMatrix::Zero(3, 6), emb).isZero(0.0));
  EXPECT_TRUE(apply_right(DenseMatrix::Identity(6, 6), emb) == DenseMatrix(materialize(emb)));
  SparseMatrix I(6, 6);
  I.setIdentity();
  EXPECT_TRUE(apply_right(I, emb) == DenseMatrix(materialize(emb)));
}

TEST(ApplyRight, DenseBitIdenticalToMaterialized) {
  Rng rng(8);
  const DenseMatrix A = gaussian_matrix(10, 30, rng);
  const auto emb = sparsestack_new(30, 6, 2, rng);
  const DenseMatrix expected = oracles::naive_product(A, DenseMatrix(materialize(emb)));
  EXPECT_TRUE(apply_right(A, emb) == expected);
}

TEST(ApplyRight, SingleEntryPropagation) {
  const auto emb = sparsestack_new(5, 8, 4, std::uint64_t{9});
  SparseMatrix A(4, 5);
  A.insert(2, 3) = 2.5;
  const DenseMatrix out = apply_right(A, emb);
  const DenseMatrix Om = DenseMatrix(materialize(emb));
  EXPECT_TRUE(out.row(2) == (2.5 * Om.row(3)).eval());
  EXPECT_EQ(out.norm(), out.row(2).norm());
}

TEST(ApplyRight, SparseMatchesDensePathExactly) {
  Rng rng(10);
  DenseMatrix A = DenseMatrix::Zero(200, 100);
  for (Index t = 0; t < 200; ++t) A(uniform_index(rng, 200), uniform_index(rng, 100)) = gaussian_matrix(1, 1, rng)(0, 0);
  const SparseMatrix As = A.sparseView();
  const auto emb = sparsestack_new(100, 12, 4, rng);
  EXPECT_TRUE(apply_right(As, emb) == apply_right(A, emb));
  EXPECT_TRUE(apply_right(A, emb) == oracles::naive_product(A, DenseMatrix(materialize(emb))));
}

TEST(ApplyRight, DimensionMismatch) {
  const auto emb = sparsestack_new(5, 4, 2, std::uint64_t{1});
  EXPECT_THROW(apply_right(DenseMatrix::Ones(3, 4), emb), Error);
  EXPECT_THROW(apply_right(SparseMatrix(3, 6), emb), Error);
}
